#pragma once

// The fifteen SP 800-22 statistical tests. Each test maps a bitstream to
// one or more p-values; tests whose structural prerequisites are unmet
// (too few bits, too few random-walk cycles) report insufficient-data
// instead of failing. Formulas and reference constants follow SP 800-22
// Rev 1a; the known-answer unit tests pin them against independently
// evaluated values.

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dltrng/core.hpp"
#include "dltrng/fft.hpp"
#include "dltrng/special.hpp"

namespace dltrng {

enum class TestId : int {
    Frequency = 0,
    BlockFrequency,
    CumulativeSums,
    Runs,
    LongestRunOfOnes,
    BinaryMatrixRank,
    DiscreteFourierTransform,
    NonOverlappingTemplate,
    OverlappingTemplate,
    MaurersUniversal,
    ApproximateEntropy,
    RandomExcursions,
    RandomExcursionsVariant,
    Serial,
    LinearComplexity,
};

inline constexpr std::array<TestId, 15> kAllTests = {
    TestId::Frequency,
    TestId::BlockFrequency,
    TestId::CumulativeSums,
    TestId::Runs,
    TestId::LongestRunOfOnes,
    TestId::BinaryMatrixRank,
    TestId::DiscreteFourierTransform,
    TestId::NonOverlappingTemplate,
    TestId::OverlappingTemplate,
    TestId::MaurersUniversal,
    TestId::ApproximateEntropy,
    TestId::RandomExcursions,
    TestId::RandomExcursionsVariant,
    TestId::Serial,
    TestId::LinearComplexity,
};

inline const char* test_name(TestId id) {
    switch (id) {
        case TestId::Frequency: return "Frequency";
        case TestId::BlockFrequency: return "BlockFrequency";
        case TestId::CumulativeSums: return "CumulativeSums";
        case TestId::Runs: return "Runs";
        case TestId::LongestRunOfOnes: return "LongestRun";
        case TestId::BinaryMatrixRank: return "Rank";
        case TestId::DiscreteFourierTransform: return "FFT";
        case TestId::NonOverlappingTemplate: return "NonOverlappingTemplate";
        case TestId::OverlappingTemplate: return "OverlappingTemplate";
        case TestId::MaurersUniversal: return "Universal";
        case TestId::ApproximateEntropy: return "ApproximateEntropy";
        case TestId::RandomExcursions: return "RandomExcursions";
        case TestId::RandomExcursionsVariant: return "RandomExcursionsVariant";
        case TestId::Serial: return "Serial";
        case TestId::LinearComplexity: return "LinearComplexity";
    }
    return "?";
}

inline TestId test_id_from_name(const std::string& name) {
    for (TestId id : kAllTests)
        if (name == test_name(id))
            return id;
    throw ValidationError("unknown test name: " + name);
}

struct TestParams {
    std::uint32_t block_frequency_m = 128;
    std::uint32_t nonoverlapping_m = 9;
    std::uint32_t overlapping_m = 9;
    std::uint32_t approx_entropy_m = 2;
    std::uint32_t serial_m = 16;
    std::uint32_t linear_complexity_m = 500;
};

enum class TestStatus {
    Ok,
    InsufficientData,
};

struct TestResult {
    TestId id{};
    TestStatus status = TestStatus::Ok;
    std::vector<double> p_values;  // fixed per-test ordering (see each test)
    std::string note;              // unmet requirement when insufficient

    static TestResult insufficient(TestId id, std::string why) {
        TestResult r;
        r.id = id;
        r.status = TestStatus::InsufficientData;
        r.note = std::move(why);
        return r;
    }
};

namespace nist_detail {

inline double clamp01(double p) {
    if (p < 0.0)
        return 0.0;
    if (p > 1.0)
        return 1.0;
    return p;
}

inline TestResult one_value(TestId id, double p) {
    TestResult r;
    r.id = id;
    r.p_values = {clamp01(p)};
    return r;
}

// --- Frequency (monobit) ---
inline TestResult frequency(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 1)
        return TestResult::insufficient(TestId::Frequency, "need at least 1 bit");
    const double sum = 2.0 * double(eps.count_ones()) - double(n);
    const double s_obs = std::fabs(sum) / std::sqrt(double(n));
    return one_value(TestId::Frequency, std::erfc(s_obs / std::sqrt(2.0)));
}

// --- Frequency within a block ---
inline TestResult block_frequency(const BitStream& eps, std::uint32_t M) {
    const std::uint64_t n = eps.size();
    if (M < 1 || n < M)
        return TestResult::insufficient(TestId::BlockFrequency,
                                        "need at least one block of " + std::to_string(M) +
                                            " bits");
    const std::uint64_t N = n / M;
    double chi2 = 0.0;
    for (std::uint64_t i = 0; i < N; ++i) {
        std::uint64_t ones = 0;
        for (std::uint64_t j = 0; j < M; ++j)
            ones += std::uint64_t(eps.bit(i * M + j));
        const double pi = double(ones) / double(M);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * double(M);
    return one_value(TestId::BlockFrequency, igamc(double(N) / 2.0, chi2 / 2.0));
}

// --- Cumulative sums, forward and backward ---
inline double cusum_p_value(std::uint64_t n, std::int64_t z) {
    const double sqrt_n = std::sqrt(double(n));
    const double dz = double(z);
    double sum1 = 0.0;
    {
        const long start = std::lround(std::floor((-double(n) / dz + 1.0) / 4.0));
        const long finish = std::lround(std::floor((double(n) / dz - 1.0) / 4.0));
        for (long k = start; k <= finish; ++k)
            sum1 += normal_cdf((4.0 * k + 1.0) * dz / sqrt_n) -
                    normal_cdf((4.0 * k - 1.0) * dz / sqrt_n);
    }
    double sum2 = 0.0;
    {
        const long start = std::lround(std::floor((-double(n) / dz - 3.0) / 4.0));
        const long finish = std::lround(std::floor((double(n) / dz - 1.0) / 4.0));
        for (long k = start; k <= finish; ++k)
            sum2 += normal_cdf((4.0 * k + 3.0) * dz / sqrt_n) -
                    normal_cdf((4.0 * k + 1.0) * dz / sqrt_n);
    }
    return 1.0 - sum1 + sum2;
}

inline TestResult cumulative_sums(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 1)
        return TestResult::insufficient(TestId::CumulativeSums, "need at least 1 bit");
    std::int64_t s = 0, z_fwd = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        s += 2 * eps.bit(i) - 1;
        z_fwd = std::max<std::int64_t>(z_fwd, std::llabs(s));
    }
    s = 0;
    std::int64_t z_bwd = 0;
    for (std::uint64_t i = n; i-- > 0;) {
        s += 2 * eps.bit(i) - 1;
        z_bwd = std::max<std::int64_t>(z_bwd, std::llabs(s));
    }
    TestResult r;
    r.id = TestId::CumulativeSums;
    r.p_values = {clamp01(cusum_p_value(n, std::max<std::int64_t>(z_fwd, 1))),
                  clamp01(cusum_p_value(n, std::max<std::int64_t>(z_bwd, 1)))};
    return r;
}

// --- Runs ---
inline TestResult runs(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 2)
        return TestResult::insufficient(TestId::Runs, "need at least 2 bits");
    const double pi = double(eps.count_ones()) / double(n);
    const double tau = 2.0 / std::sqrt(double(n));
    if (std::fabs(pi - 0.5) >= tau)
        return one_value(TestId::Runs, 0.0);  // monobit prerequisite failed
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i + 1 < n; ++i)
        v += std::uint64_t(eps.bit(i) != eps.bit(i + 1));
    const double prod = pi * (1.0 - pi);
    const double arg =
        std::fabs(double(v) - 2.0 * double(n) * prod) / (2.0 * std::sqrt(2.0 * double(n)) * prod);
    return one_value(TestId::Runs, std::erfc(arg));
}

// --- Longest run of ones in a block ---
inline TestResult longest_run(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 128)
        return TestResult::insufficient(TestId::LongestRunOfOnes, "need at least 128 bits");

    std::uint32_t M;
    int K;
    std::vector<double> pi;
    std::vector<std::uint32_t> edges;  // category upper bounds, last is open
    if (n < 6272) {
        M = 8;
        K = 3;
        pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
        edges = {1, 2, 3};
    } else if (n < 750000) {
        M = 128;
        K = 5;
        pi = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
        edges = {4, 5, 6, 7, 8};
    } else {
        M = 10000;
        K = 6;
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
        edges = {10, 11, 12, 13, 14, 15};
    }

    const std::uint64_t N = n / M;
    std::vector<std::uint64_t> nu(std::size_t(K) + 1, 0);
    for (std::uint64_t b = 0; b < N; ++b) {
        std::uint32_t longest = 0, run = 0;
        for (std::uint64_t j = b * M; j < (b + 1) * M; ++j) {
            if (eps.bit(j)) {
                ++run;
                longest = std::max(longest, run);
            } else {
                run = 0;
            }
        }
        std::size_t cat = edges.size();
        for (std::size_t c = 0; c < edges.size(); ++c) {
            if (longest <= edges[c]) {
                cat = c;
                break;
            }
        }
        ++nu[cat];
    }
    double chi2 = 0.0;
    for (std::size_t c = 0; c <= std::size_t(K); ++c) {
        const double expect = double(N) * pi[c];
        chi2 += (double(nu[c]) - expect) * (double(nu[c]) - expect) / expect;
    }
    return one_value(TestId::LongestRunOfOnes, igamc(double(K) / 2.0, chi2 / 2.0));
}

// --- Binary matrix rank (32x32) ---
inline int rank_of_32x32(std::array<std::uint32_t, 32>& rows) {
    int rank = 0;
    for (int bit = 31; bit >= 0 && rank < 32; --bit) {
        const std::uint32_t mask = 1u << bit;
        int pivot = -1;
        for (int r = rank; r < 32; ++r) {
            if (rows[std::size_t(r)] & mask) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0)
            continue;
        std::swap(rows[std::size_t(pivot)], rows[std::size_t(rank)]);
        for (int r = 0; r < 32; ++r)
            if (r != rank && (rows[std::size_t(r)] & mask))
                rows[std::size_t(r)] ^= rows[std::size_t(rank)];
        ++rank;
    }
    return rank;
}

inline TestResult binary_matrix_rank(const BitStream& eps) {
    constexpr std::uint64_t kMatrixBits = 32 * 32;
    const std::uint64_t N = eps.size() / kMatrixBits;
    if (N == 0)
        return TestResult::insufficient(TestId::BinaryMatrixRank,
                                        "need at least 1024 bits for one 32x32 matrix");

    // Exact rank distribution over GF(2).
    double p_full = 1.0, p_minus1;
    for (int i = 0; i < 32; ++i)
        p_full *= 1.0 - std::ldexp(1.0, i - 32);
    {
        double prod = 1.0;
        for (int i = 0; i <= 30; ++i) {
            const double num = 1.0 - std::ldexp(1.0, i - 32);
            const double den = 1.0 - std::ldexp(1.0, i - 31);
            prod *= num * num / den;
        }
        p_minus1 = prod / 2.0;
    }
    const double p_rest = 1.0 - p_full - p_minus1;

    std::uint64_t f_full = 0, f_minus1 = 0;
    std::uint64_t pos = 0;
    for (std::uint64_t m = 0; m < N; ++m) {
        std::array<std::uint32_t, 32> rows{};
        for (int r = 0; r < 32; ++r) {
            std::uint32_t v = 0;
            for (int c = 0; c < 32; ++c)
                v = (v << 1) | std::uint32_t(eps.bit(pos++));
            rows[std::size_t(r)] = v;
        }
        const int rank = rank_of_32x32(rows);
        if (rank == 32)
            ++f_full;
        else if (rank == 31)
            ++f_minus1;
    }
    const double f_rest = double(N - f_full - f_minus1);
    const double e_full = double(N) * p_full;
    const double e_minus1 = double(N) * p_minus1;
    const double e_rest = double(N) * p_rest;
    const double chi2 = (double(f_full) - e_full) * (double(f_full) - e_full) / e_full +
                        (double(f_minus1) - e_minus1) * (double(f_minus1) - e_minus1) / e_minus1 +
                        (f_rest - e_rest) * (f_rest - e_rest) / e_rest;
    return one_value(TestId::BinaryMatrixRank, igamc(1.0, chi2 / 2.0));
}

// --- Discrete Fourier transform (spectral) ---
inline TestResult dft_test(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 10)
        return TestResult::insufficient(TestId::DiscreteFourierTransform,
                                        "need at least 10 bits");
    std::vector<std::complex<double>> x(n);
    for (std::uint64_t i = 0; i < n; ++i)
        x[i] = {double(2 * eps.bit(i) - 1), 0.0};
    const auto spectrum = dft_forward(std::move(x));

    const double threshold = std::sqrt(std::log(1.0 / 0.05) * double(n));
    std::uint64_t below = 0;
    for (std::uint64_t k = 0; k < n / 2; ++k)
        below += std::uint64_t(std::abs(spectrum[k]) < threshold);
    const double n0 = 0.95 * double(n) / 2.0;
    const double d =
        (double(below) - n0) / std::sqrt(double(n) * 0.95 * 0.05 / 4.0);
    return one_value(TestId::DiscreteFourierTransform, std::erfc(std::fabs(d) / std::sqrt(2.0)));
}

// --- Non-overlapping template matching ---
// A template is aperiodic when no proper prefix equals the same-length
// suffix; m=9 yields 148 of them. p-values are reported in ascending
// template-value order.
inline std::vector<std::uint32_t> aperiodic_templates(std::uint32_t m) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t value = 0; value < (1u << m); ++value) {
        bool aperiodic = true;
        for (std::uint32_t k = 1; k < m && aperiodic; ++k) {
            const std::uint32_t len = m - k;
            const std::uint32_t prefix = value >> k;
            const std::uint32_t suffix = value & ((1u << len) - 1);
            if (prefix == suffix)
                aperiodic = false;
        }
        if (aperiodic)
            out.push_back(value);
    }
    return out;
}

inline TestResult non_overlapping_template(const BitStream& eps, std::uint32_t m) {
    constexpr std::uint32_t N = 8;
    const std::uint64_t n = eps.size();
    if (m < 2 || m > 16)
        throw ValidationError("non-overlapping template: m must be in [2, 16]");
    const std::uint64_t M = n / N;
    if (M < m + 1)
        return TestResult::insufficient(
            TestId::NonOverlappingTemplate,
            "need at least " + std::to_string(N * (m + 1)) + " bits for 8 blocks");

    const auto templates = aperiodic_templates(m);
    std::vector<int> index_of(std::size_t(1) << m, -1);
    for (std::size_t t = 0; t < templates.size(); ++t)
        index_of[templates[t]] = int(t);

    const double mu = double(M - m + 1) / std::ldexp(1.0, int(m));
    const double sigma2 =
        double(M) * (1.0 / std::ldexp(1.0, int(m)) -
                     double(2 * m - 1) / std::ldexp(1.0, int(2 * m)));

    std::vector<double> chi2(templates.size(), 0.0);
    std::vector<std::uint32_t> counts(templates.size());
    std::vector<std::uint64_t> next_allowed(templates.size());
    const std::uint32_t mask = (1u << m) - 1;
    for (std::uint32_t block = 0; block < N; ++block) {
        std::fill(counts.begin(), counts.end(), 0u);
        std::fill(next_allowed.begin(), next_allowed.end(), 0ull);
        const std::uint64_t base = std::uint64_t(block) * M;
        std::uint32_t window = 0;
        for (std::uint64_t j = 0; j < M; ++j) {
            window = ((window << 1) | std::uint32_t(eps.bit(base + j))) & mask;
            if (j + 1 < m)
                continue;
            const std::uint64_t start = j + 1 - m;  // match start within block
            const int t = index_of[window];
            if (t >= 0 && start >= next_allowed[std::size_t(t)]) {
                ++counts[std::size_t(t)];
                next_allowed[std::size_t(t)] = start + m;
            }
        }
        for (std::size_t t = 0; t < templates.size(); ++t) {
            const double d = double(counts[t]) - mu;
            chi2[t] += d * d / sigma2;
        }
    }
    TestResult r;
    r.id = TestId::NonOverlappingTemplate;
    r.p_values.reserve(templates.size());
    for (double c : chi2)
        r.p_values.push_back(clamp01(igamc(double(N) / 2.0, c / 2.0)));
    return r;
}

// --- Overlapping template matching (all-ones template) ---
inline TestResult overlapping_template(const BitStream& eps, std::uint32_t m) {
    constexpr std::uint32_t M = 1032;
    constexpr int K = 5;
    if (m != 9)
        throw ValidationError("overlapping template: reference distribution is fixed at m = 9");
    const std::uint64_t n = eps.size();
    const std::uint64_t N = n / M;
    if (N == 0)
        return TestResult::insufficient(TestId::OverlappingTemplate,
                                        "need at least 1032 bits for one block");
    // Reference distribution for m=9, M=1032 (SP 800-22 Rev 1a section 2.8).
    static constexpr std::array<double, 6> pi = {0.364091, 0.185659, 0.139381,
                                                 0.100571, 0.0704323, 0.139865};
    std::array<std::uint64_t, 6> nu{};
    const std::uint32_t mask = (1u << m) - 1;
    for (std::uint64_t b = 0; b < N; ++b) {
        std::uint32_t window = 0;
        std::uint32_t matches = 0;
        for (std::uint64_t j = 0; j < M; ++j) {
            window = ((window << 1) | std::uint32_t(eps.bit(b * M + j))) & mask;
            if (j + 1 >= m && window == mask)
                ++matches;
        }
        ++nu[std::min<std::uint32_t>(matches, K)];
    }
    double chi2 = 0.0;
    for (int i = 0; i <= K; ++i) {
        const double expect = double(N) * pi[std::size_t(i)];
        chi2 += (double(nu[std::size_t(i)]) - expect) * (double(nu[std::size_t(i)]) - expect) /
                expect;
    }
    return one_value(TestId::OverlappingTemplate, igamc(double(K) / 2.0, chi2 / 2.0));
}

// --- Maurer's universal statistical test ---
inline TestResult universal(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 387840)
        return TestResult::insufficient(TestId::MaurersUniversal,
                                        "need at least 387840 bits (L = 6)");
    int L = 6;
    if (n >= 904960) L = 7;
    if (n >= 2068480) L = 8;
    if (n >= 4654080) L = 9;
    if (n >= 10342400) L = 10;
    if (n >= 22753280) L = 11;
    if (n >= 49643520) L = 12;
    if (n >= 105981440) L = 13;
    if (n >= 225843200) L = 14;
    if (n >= 478415360) L = 15;
    if (n >= 1009254400) L = 16;

    static constexpr std::array<double, 17> expected = {
        0, 0, 0, 0, 0, 0, 5.2177052, 6.1962507, 7.1836656, 8.1764248, 9.1723243,
        10.170032, 11.168765, 12.168070, 13.167693, 14.167488, 15.167379};
    static constexpr std::array<double, 17> variance = {
        0, 0, 0, 0, 0, 0, 2.954, 3.125, 3.238, 3.311, 3.356,
        3.384, 3.401, 3.410, 3.416, 3.419, 3.421};

    const std::uint64_t Q = 10ull << L;
    const std::uint64_t K = n / std::uint64_t(L) - Q;
    std::vector<std::uint64_t> last(std::size_t(1) << L, 0);

    auto block_value = [&](std::uint64_t b) {
        std::uint32_t v = 0;
        for (int j = 0; j < L; ++j)
            v = (v << 1) | std::uint32_t(eps.bit(b * std::uint64_t(L) + j));
        return v;
    };

    for (std::uint64_t b = 0; b < Q; ++b)
        last[block_value(b)] = b + 1;  // 1-based block numbers
    double sum = 0.0;
    for (std::uint64_t b = Q; b < Q + K; ++b) {
        const std::uint32_t v = block_value(b);
        sum += std::log2(double(b + 1 - last[v]));
        last[v] = b + 1;
    }
    const double fn = sum / double(K);
    const double c = 0.7 - 0.8 / double(L) +
                     (4.0 + 32.0 / double(L)) * std::pow(double(K), -3.0 / double(L)) / 15.0;
    const double sigma = c * std::sqrt(variance[std::size_t(L)] / double(K));
    const double arg = std::fabs(fn - expected[std::size_t(L)]) / (std::sqrt(2.0) * sigma);
    return one_value(TestId::MaurersUniversal, std::erfc(arg));
}

// --- Approximate entropy ---
inline double apen_phi(const BitStream& eps, std::uint32_t m) {
    if (m == 0)
        return 0.0;
    const std::uint64_t n = eps.size();
    std::vector<std::uint32_t> counts(std::size_t(1) << m, 0);
    const std::uint32_t mask = (1u << m) - 1;
    std::uint32_t window = 0;
    for (std::uint64_t i = 0; i < m - 1; ++i)
        window = (window << 1) | std::uint32_t(eps.bit(i));
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t tail = (i + m - 1) % n;  // circular extension
        window = ((window << 1) | std::uint32_t(eps.bit(tail))) & mask;
        ++counts[window];
    }
    double phi = 0.0;
    for (std::uint32_t c : counts) {
        if (c == 0)
            continue;
        const double rel = double(c) / double(n);
        phi += rel * std::log(rel);
    }
    return phi;
}

inline TestResult approximate_entropy(const BitStream& eps, std::uint32_t m) {
    const std::uint64_t n = eps.size();
    if (m < 1 || n < m + 2)
        return TestResult::insufficient(TestId::ApproximateEntropy,
                                        "need more bits than the block length");
    const double apen = apen_phi(eps, m) - apen_phi(eps, m + 1);
    const double chi2 = 2.0 * double(n) * (std::log(2.0) - apen);
    return one_value(TestId::ApproximateEntropy,
                     igamc(std::ldexp(1.0, int(m) - 1), chi2 / 2.0));
}

// --- Random excursions (states -4..-1, 1..4) ---
struct WalkCycles {
    std::uint64_t cycles = 0;                       // J
    std::array<std::uint64_t, 6> visit_counts[8];   // [state][k], k capped at 5
    std::array<std::uint64_t, 18> total_visits{};   // states -9..-1, 1..9
};

inline int excursion_state_slot8(int x) {  // -4..-1,1..4 -> 0..7
    return x < 0 ? x + 4 : x + 3;
}
inline int excursion_state_slot18(int x) {  // -9..-1,1..9 -> 0..17
    return x < 0 ? x + 9 : x + 8;
}

inline WalkCycles walk_cycles(const BitStream& eps) {
    WalkCycles w{};
    for (auto& a : w.visit_counts)
        a.fill(0);
    std::array<std::uint32_t, 8> in_cycle{};  // visits per |state|<=4 in current cycle
    std::int64_t s = 0;
    const std::uint64_t n = eps.size();
    auto close_cycle = [&] {
        ++w.cycles;
        for (int slot = 0; slot < 8; ++slot) {
            const std::uint64_t k = std::min<std::uint64_t>(in_cycle[std::size_t(slot)], 5);
            ++w.visit_counts[slot][k];
        }
        in_cycle.fill(0);
    };
    for (std::uint64_t i = 0; i < n; ++i) {
        s += 2 * eps.bit(i) - 1;
        if (s == 0) {
            close_cycle();
        } else {
            if (s >= -4 && s <= 4)
                ++in_cycle[std::size_t(excursion_state_slot8(int(s)))];
            if (s >= -9 && s <= 9)
                ++w.total_visits[std::size_t(excursion_state_slot18(int(s)))];
        }
    }
    if (s != 0)
        close_cycle();  // walk is closed with a final return to zero
    return w;
}

inline TestResult random_excursions(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 2)
        return TestResult::insufficient(TestId::RandomExcursions, "need at least 2 bits");
    const WalkCycles w = walk_cycles(eps);
    const double j_min = std::max(0.005 * std::sqrt(double(n)), 500.0);
    if (double(w.cycles) < j_min)
        return TestResult::insufficient(
            TestId::RandomExcursions, "J = " + std::to_string(w.cycles) +
                                          " cycles < required " +
                                          std::to_string(std::uint64_t(j_min)));
    TestResult r;
    r.id = TestId::RandomExcursions;
    const double J = double(w.cycles);
    for (int x : {-4, -3, -2, -1, 1, 2, 3, 4}) {
        const double ax = std::fabs(double(x));
        std::array<double, 6> pi{};
        pi[0] = 1.0 - 1.0 / (2.0 * ax);
        for (int k = 1; k <= 4; ++k)
            pi[std::size_t(k)] =
                (1.0 / (4.0 * ax * ax)) * std::pow(1.0 - 1.0 / (2.0 * ax), k - 1);
        pi[5] = (1.0 / (2.0 * ax)) * std::pow(1.0 - 1.0 / (2.0 * ax), 4);
        double chi2 = 0.0;
        const auto& nu = w.visit_counts[std::size_t(excursion_state_slot8(x))];
        for (int k = 0; k <= 5; ++k) {
            const double expect = J * pi[std::size_t(k)];
            chi2 += (double(nu[std::size_t(k)]) - expect) * (double(nu[std::size_t(k)]) - expect) /
                    expect;
        }
        r.p_values.push_back(clamp01(igamc(2.5, chi2 / 2.0)));
    }
    return r;
}

inline TestResult random_excursions_variant(const BitStream& eps) {
    const std::uint64_t n = eps.size();
    if (n < 2)
        return TestResult::insufficient(TestId::RandomExcursionsVariant, "need at least 2 bits");
    const WalkCycles w = walk_cycles(eps);
    const double j_min = std::max(0.005 * std::sqrt(double(n)), 500.0);
    if (double(w.cycles) < j_min)
        return TestResult::insufficient(
            TestId::RandomExcursionsVariant, "J = " + std::to_string(w.cycles) +
                                                 " cycles < required " +
                                                 std::to_string(std::uint64_t(j_min)));
    TestResult r;
    r.id = TestId::RandomExcursionsVariant;
    const double J = double(w.cycles);
    for (int x = -9; x <= 9; ++x) {
        if (x == 0)
            continue;
        const double xi = double(w.total_visits[std::size_t(excursion_state_slot18(x))]);
        const double denom = std::sqrt(2.0 * J * (4.0 * std::fabs(double(x)) - 2.0));
        r.p_values.push_back(clamp01(std::erfc(std::fabs(xi - J) / denom)));
    }
    return r;
}

// --- Serial ---
inline double serial_psi2(const BitStream& eps, std::uint32_t m) {
    if (m == 0)
        return 0.0;
    const std::uint64_t n = eps.size();
    std::vector<std::uint32_t> counts(std::size_t(1) << m, 0);
    const std::uint32_t mask = m >= 32 ? 0xFFFFFFFFu : (1u << m) - 1;
    std::uint32_t window = 0;
    for (std::uint64_t i = 0; i < m - 1; ++i)
        window = (window << 1) | std::uint32_t(eps.bit(i));
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t tail = (i + m - 1) % n;
        window = ((window << 1) | std::uint32_t(eps.bit(tail))) & mask;
        ++counts[window];
    }
    double sum = 0.0;
    for (std::uint32_t c : counts)
        sum += double(c) * double(c);
    return sum * std::ldexp(1.0, int(m)) / double(n) - double(n);
}

inline TestResult serial(const BitStream& eps, std::uint32_t m) {
    const std::uint64_t n = eps.size();
    if (m < 2 || m > 20)
        throw ValidationError("serial: m must be in [2, 20]");
    if (n < m + 2)
        return TestResult::insufficient(TestId::Serial, "need more bits than the block length");
    const double psi_m = serial_psi2(eps, m);
    const double psi_m1 = serial_psi2(eps, m - 1);
    const double psi_m2 = serial_psi2(eps, m - 2);
    const double del1 = psi_m - psi_m1;
    const double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    TestResult r;
    r.id = TestId::Serial;
    r.p_values = {clamp01(igamc(std::ldexp(1.0, int(m) - 2), del1 / 2.0)),
                  clamp01(igamc(std::ldexp(1.0, int(m) - 3), del2 / 2.0))};
    return r;
}

// --- Linear complexity (Berlekamp-Massey per block) ---
// The discrepancy dot-product runs word-parallel against a bit-reversed
// copy of the block, so each block costs O(M^2 / 64).
class BerlekampMassey {
public:
    explicit BerlekampMassey(std::uint32_t max_bits)
        : words_((max_bits + 2 + 63) / 64),
          c_(words_),
          b_(words_),
          tmp_(words_),
          // The word-parallel discrepancy reads whole words past the live
          // window; the zero padding is masked off by zero c coefficients.
          rev_((max_bits + 63) / 64 + 3) {}

    /// Linear complexity of bits[0..len).
    std::uint32_t complexity(const BitStream& eps, std::uint64_t offset, std::uint32_t len) {
        std::fill(c_.begin(), c_.end(), 0ull);
        std::fill(b_.begin(), b_.end(), 0ull);
        std::fill(rev_.begin(), rev_.end(), 0ull);
        c_[0] = 1;
        b_[0] = 1;
        // rev_ bit j holds s[len-1-j].
        for (std::uint32_t j = 0; j < len; ++j)
            if (eps.bit(offset + (len - 1 - j)))
                rev_[j >> 6] |= 1ull << (j & 63);

        std::uint32_t L = 0;
        std::int64_t m = -1;
        for (std::uint32_t pos = 0; pos < len; ++pos) {
            // d = sum_{i=0..L} c[i] * s[pos-i]  =  c . rev[len-1-pos ..]
            const std::uint32_t shift = len - 1 - pos;
            const std::uint32_t word = shift >> 6;
            const std::uint32_t off = shift & 63;
            int d = 0;
            const std::uint32_t cwords = (L + 64) >> 6;  // words covering c[0..L]
            for (std::uint32_t k = 0; k < cwords; ++k) {
                std::uint64_t seg = rev_[word + k] >> off;
                if (off != 0)
                    seg |= rev_[word + k + 1] << (64 - off);
                d ^= int(std::popcount(c_[k] & seg) & 1u);
            }
            if (d == 0)
                continue;
            if (2 * L <= pos) {
                tmp_ = c_;
                xor_shifted(c_, b_, std::uint32_t(std::int64_t(pos) - m));
                L = pos + 1 - L;
                b_ = tmp_;
                m = std::int64_t(pos);
            } else {
                xor_shifted(c_, b_, std::uint32_t(std::int64_t(pos) - m));
            }
        }
        return L;
    }

private:
    static void xor_shifted(std::vector<std::uint64_t>& dst,
                            const std::vector<std::uint64_t>& src, std::uint32_t bits) {
        const std::uint32_t word = bits >> 6;
        const std::uint32_t off = bits & 63;
        for (std::size_t k = dst.size(); k-- > word;) {
            std::uint64_t v = src[k - word] << off;
            if (off != 0 && k > word)
                v |= src[k - word - 1] >> (64 - off);
            dst[k] ^= v;
        }
    }

    std::uint32_t words_;
    std::vector<std::uint64_t> c_, b_, tmp_, rev_;
};

inline TestResult linear_complexity(const BitStream& eps, std::uint32_t M) {
    const std::uint64_t n = eps.size();
    if (M < 8)
        throw ValidationError("linear complexity: block length must be >= 8");
    const std::uint64_t N = n / M;
    if (N == 0)
        return TestResult::insufficient(TestId::LinearComplexity,
                                        "need at least one block of " + std::to_string(M) +
                                            " bits");
    static constexpr std::array<double, 7> pi = {0.010417, 0.03125, 0.125, 0.5,
                                                 0.25, 0.0625, 0.020833};
    const double mu = double(M) / 2.0 + (9.0 + (M % 2 == 0 ? -1.0 : 1.0)) / 36.0 -
                      (double(M) / 3.0 + 2.0 / 9.0) / std::ldexp(1.0, int(std::min<std::uint32_t>(M, 60)));
    std::array<std::uint64_t, 7> nu{};
    BerlekampMassey bm(M);
    for (std::uint64_t b = 0; b < N; ++b) {
        const double L = double(bm.complexity(eps, b * M, M));
        const double sign = (M % 2 == 0) ? 1.0 : -1.0;
        const double t = sign * (L - mu) + 2.0 / 9.0;
        int cat;
        if (t <= -2.5) cat = 0;
        else if (t <= -1.5) cat = 1;
        else if (t <= -0.5) cat = 2;
        else if (t <= 0.5) cat = 3;
        else if (t <= 1.5) cat = 4;
        else if (t <= 2.5) cat = 5;
        else cat = 6;
        ++nu[std::size_t(cat)];
    }
    double chi2 = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double expect = double(N) * pi[std::size_t(i)];
        chi2 += (double(nu[std::size_t(i)]) - expect) * (double(nu[std::size_t(i)]) - expect) /
                expect;
    }
    return one_value(TestId::LinearComplexity, igamc(3.0, chi2 / 2.0));
}

}  // namespace nist_detail

/// Runs one statistical test over one stream.
inline TestResult run_test(TestId id, const BitStream& stream, const TestParams& params = {}) {
    using namespace nist_detail;
    switch (id) {
        case TestId::Frequency: return frequency(stream);
        case TestId::BlockFrequency: return block_frequency(stream, params.block_frequency_m);
        case TestId::CumulativeSums: return cumulative_sums(stream);
        case TestId::Runs: return runs(stream);
        case TestId::LongestRunOfOnes: return longest_run(stream);
        case TestId::BinaryMatrixRank: return binary_matrix_rank(stream);
        case TestId::DiscreteFourierTransform: return dft_test(stream);
        case TestId::NonOverlappingTemplate:
            return non_overlapping_template(stream, params.nonoverlapping_m);
        case TestId::OverlappingTemplate:
            return overlapping_template(stream, params.overlapping_m);
        case TestId::MaurersUniversal: return universal(stream);
        case TestId::ApproximateEntropy:
            return approximate_entropy(stream, params.approx_entropy_m);
        case TestId::RandomExcursions: return random_excursions(stream);
        case TestId::RandomExcursionsVariant: return random_excursions_variant(stream);
        case TestId::Serial: return serial(stream, params.serial_m);
        case TestId::LinearComplexity:
            return linear_complexity(stream, params.linear_complexity_m);
    }
    throw ValidationError("unknown test id");
}

}  // namespace dltrng
