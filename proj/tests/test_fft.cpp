#include "dltrng/fft.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <random>
#include <vector>

using namespace dltrng;

namespace {

// Quadratic-time DFT oracle, independent of the FFT path.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * double((j * k) % n) / double(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<std::complex<double>> random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::complex<double>> x(n);
    for (auto& v : x)
        v = {u(rng), u(rng)};
    return x;
}

}  // namespace

TEST(Fft, MatchesNaiveDftOracle) {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 12u, 16u, 27u, 64u, 100u, 257u, 1000u}) {
        const auto x = random_signal(n, 1000 + n);
        const auto fast = dft_forward(x);
        const auto slow = naive_dft(x);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(fast[k] - slow[k]));
        EXPECT_LT(worst, 1e-9 * double(n) + 1e-10) << "n = " << n;
    }
}

TEST(Fft, ImpulseGivesFlatSpectrum) {
    std::vector<std::complex<double>> x(1024, {0.0, 0.0});
    x[0] = {1.0, 0.0};
    const auto s = dft_forward(x);
    for (const auto& v : s)
        EXPECT_NEAR(std::abs(v - std::complex<double>{1.0, 0.0}), 0.0, 1e-12);
}

TEST(Fft, ConstantSignalConcentratesAtDc) {
    const std::size_t n = 1000;  // exercises the Bluestein path
    std::vector<std::complex<double>> x(n, {1.0, 0.0});
    const auto s = dft_forward(x);
    EXPECT_NEAR(s[0].real(), double(n), 1e-8);
    for (std::size_t k = 1; k < n; ++k)
        EXPECT_LT(std::abs(s[k]), 1e-8) << k;
}

TEST(Fft, LargeNonPowerOfTwoAgainstSpotChecks) {
    // Spot-check a few bins of a 10^5-point Bluestein transform against
    // direct evaluation.
    const std::size_t n = 100000;
    const auto x = random_signal(n, 99);
    const auto fast = dft_forward(x);
    for (std::size_t k : {0ul, 1ul, 499ul, 49999ul, 99999ul}) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * double((j * k) % n) / double(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        EXPECT_LT(std::abs(fast[k] - acc), 1e-6) << "bin " << k;
    }
}
