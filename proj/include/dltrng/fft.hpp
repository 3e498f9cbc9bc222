#pragma once

// Complex FFT for the spectral test: iterative radix-2 with precomputed
// twiddle tables for power-of-two sizes, Bluestein's chirp-z transform for
// everything else (stream lengths like 10^6 are not powers of two). Chirp
// phases use k^2 mod 2n in integer arithmetic so the quadratic phase never
// loses precision at large k. Plans are cached per length.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace dltrng {

namespace detail {

struct Radix2Plan {
    std::size_t n;
    std::vector<std::complex<double>> roots;  // exp(-2 pi i j / n), j < n/2

    explicit Radix2Plan(std::size_t size) : n(size), roots(size / 2) {
        for (std::size_t j = 0; j < roots.size(); ++j) {
            const double ang = -2.0 * std::numbers::pi * double(j) / double(n);
            roots[j] = {std::cos(ang), std::sin(ang)};
        }
    }
};

inline void fft_pow2(std::vector<std::complex<double>>& a, const Radix2Plan& plan,
                     bool inverse) {
    const std::size_t n = a.size();
    if (n < 2)
        return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                std::complex<double> w = plan.roots[j * step];
                if (inverse)
                    w = std::conj(w);
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / double(n);
        for (auto& x : a)
            x *= inv;
    }
}

struct BluesteinPlan {
    std::size_t n = 0;
    std::size_t m = 0;  // convolution FFT size (power of two >= 2n-1)
    std::vector<std::complex<double>> chirp;       // exp(-i pi k^2 / n), k < n
    std::vector<std::complex<double>> kernel_fft;  // FFT of conjugate-chirp kernel
    std::unique_ptr<Radix2Plan> radix;

    explicit BluesteinPlan(std::size_t size) : n(size) {
        m = 1;
        while (m < 2 * n - 1)
            m <<= 1;
        radix = std::make_unique<Radix2Plan>(m);
        chirp.resize(n);
        std::vector<std::complex<double>> kernel(m, {0.0, 0.0});
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the phase argument small and exact.
            const std::uint64_t q = (std::uint64_t(k) * k) % (2 * n);
            const double ang = std::numbers::pi * double(q) / double(n);
            chirp[k] = {std::cos(ang), -std::sin(ang)};
            kernel[k] = std::conj(chirp[k]);
            if (k != 0)
                kernel[m - k] = std::conj(chirp[k]);
        }
        fft_pow2(kernel, *radix, false);
        kernel_fft = std::move(kernel);
    }
};

template <typename Plan>
std::shared_ptr<const Plan> cached_plan(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::weak_ptr<const Plan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) {
        if (auto p = it->second.lock())
            return p;
    }
    auto plan = std::make_shared<const Plan>(n);
    cache[n] = plan;
    return plan;
}

}  // namespace detail

/// Forward DFT of arbitrary length: X_k = sum_j x_j exp(-2 pi i j k / n).
inline std::vector<std::complex<double>> dft_forward(std::vector<std::complex<double>> x) {
    const std::size_t n = x.size();
    if (n == 0)
        return x;
    if ((n & (n - 1)) == 0) {
        const auto plan = detail::cached_plan<detail::Radix2Plan>(n);
        detail::fft_pow2(x, *plan, false);
        return x;
    }
    const auto plan = detail::cached_plan<detail::BluesteinPlan>(n);
    std::vector<std::complex<double>> a(plan->m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
        a[k] = x[k] * plan->chirp[k];
    detail::fft_pow2(a, *plan->radix, false);
    for (std::size_t i = 0; i < plan->m; ++i)
        a[i] *= plan->kernel_fft[i];
    detail::fft_pow2(a, *plan->radix, true);
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = a[k] * plan->chirp[k];
    return out;
}

}  // namespace dltrng
