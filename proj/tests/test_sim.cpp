#include "dltrng/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace dltrng;

namespace {

const DramGeometry kSmall{1, 16, 1u << 16};  // 2^20 cells

MeasurementSpec reduced_latency(std::uint32_t index = 0) {
    MeasurementSpec spec;
    spec.t_rp_fraction = 0.19;
    spec.measurement_index = index;
    return spec;
}

}  // namespace

TEST(Population, PresetsValidate) {
    for (const auto& name : population_preset_names()) {
        const PopulationConfig cfg = population_preset(name);
        EXPECT_NO_THROW(cfg.validate()) << name;
    }
    EXPECT_THROW(population_preset("hynix-z"), ValidationError);
}

TEST(Population, ValidationCatchesBadConfigs) {
    PopulationConfig cfg = population_preset("micron");
    cfg.frac_noisy += 0.1;
    EXPECT_THROW(cfg.validate(), ValidationError);

    cfg = population_preset("micron");
    cfg.noisy_bias_mixture[0].weight += 0.01;
    EXPECT_THROW(cfg.validate(), ValidationError);

    cfg = population_preset("micron");
    cfg.noisy_bias_mixture[0].alpha = 0.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Device, DegenerateAllPatternIndependent) {
    PopulationConfig cfg;
    cfg.frac_pattern_independent = 1.0;
    cfg.stuck_value_weight = 0.3;
    SimulatedDevice dev({1, 4, 256}, cfg, 9);
    for (std::uint32_t r = 0; r < 4; ++r)
        for (std::uint32_t c = 0; c < 256; ++c)
            EXPECT_EQ(dev.behavior({0, r, c}).cls, CellClass::PatternIndependent);
}

TEST(Device, EmpiricalClassFractionsMatchConfig) {
    // Ground-truth class assignment over 2^20 cells; +-0.5 percentage
    // points is ~11 sigma at this sample size.
    const PopulationConfig cfg = population_preset("micron");
    SimulatedDevice dev(kSmall, cfg, 42);
    std::map<CellClass, std::uint64_t> counts;
    for (std::uint32_t r = 0; r < kSmall.rows_per_bank; ++r)
        for (std::uint32_t c = 0; c < kSmall.cols_per_row; ++c)
            ++counts[dev.behavior({0, r, c}).cls];
    const double total = double(cell_count(kSmall));
    EXPECT_NEAR(counts[CellClass::PatternIndependent] / total, cfg.frac_pattern_independent,
                0.005);
    EXPECT_NEAR(counts[CellClass::PatternDependent] / total, cfg.frac_pattern_dependent, 0.005);
    EXPECT_NEAR(counts[CellClass::Noisy] / total, cfg.frac_noisy, 0.005);
}

TEST(Device, SamsungBWindowMassMatchesCalibration) {
    // Fraction of noisy cells whose true bias lies in [0.4, 0.6]:
    // calibrated to ~0.48% for the samsung-b preset.
    SimulatedDevice dev(kSmall, population_preset("samsung-b"), 7);
    std::uint64_t noisy = 0, in_window = 0;
    for (std::uint32_t r = 0; r < kSmall.rows_per_bank; ++r)
        for (std::uint32_t c = 0; c < kSmall.cols_per_row; ++c) {
            const CellBehavior b = dev.behavior({0, r, c});
            if (b.cls != CellClass::Noisy)
                continue;
            ++noisy;
            if (b.bias >= 0.4 && b.bias <= 0.6)
                ++in_window;
        }
    const double ratio = double(in_window) / double(noisy);
    EXPECT_GT(ratio, 0.0048 * 0.75);
    EXPECT_LT(ratio, 0.0048 * 1.25);
}

TEST(Device, WritePatternExpandsByte) {
    SimulatedDevice dev({1, 2, 64}, population_preset("ideal"), 1);
    MeasurementSpec full;
    full.t_rp_fraction = 1.0;  // fault-free read returns stored data

    dev.write_pattern(0xFF);
    BitStream page = dev.read_page(0, 0, full);
    for (std::uint32_t c = 0; c < 64; ++c)
        EXPECT_EQ(page.bit(c), 1);

    dev.write_pattern(0x00);
    page = dev.read_page(0, 1, full);
    for (std::uint32_t c = 0; c < 64; ++c)
        EXPECT_EQ(page.bit(c), 0);

    dev.write_pattern(0xAA);
    page = dev.read_page(0, 0, full);
    for (std::uint32_t c = 0; c < 64; ++c)
        EXPECT_EQ(page.bit(c), (c % 2 == 0) ? 1 : 0) << c;
}

TEST(Device, FaultFreeReadEchoesAnyPattern) {
    SimulatedDevice dev({1, 2, 128}, population_preset("samsung-b"), 3);
    MeasurementSpec full;
    full.t_rp_fraction = 1.0;
    dev.write_pattern(0x5A);
    const BitStream page = dev.read_page(0, 1, full);
    for (std::uint32_t c = 0; c < 128; ++c)
        EXPECT_EQ(page.bit(c), (0x5A >> (7 - (c & 7))) & 1);
}

TEST(Device, NoisyFairCellMonteCarloMatchesBernoulliOracle) {
    // An ideal-preset cell has bias ~0.5; over 1e5 fresh reads the
    // ones-fraction must sit within 0.5 +- 0.005 (3 sigma ~ 0.0047).
    SimulatedDevice dev({1, 1, 8}, population_preset("ideal"), 17);
    const CellAddress cell{0, 0, 3};
    ASSERT_EQ(dev.behavior(cell).cls, CellClass::Noisy);
    EXPECT_NEAR(dev.behavior(cell).bias, 0.5, 0.01);
    std::uint64_t ones = 0;
    const int reads = 100000;
    for (int i = 0; i < reads; ++i) {
        MeasurementSpec spec = reduced_latency(std::uint32_t(i));
        ones += std::uint64_t(dev.read_cell(cell, spec));
    }
    EXPECT_NEAR(double(ones) / reads, 0.5, 0.005);
}

TEST(Device, RereadSameSpecIsIdentical) {
    SimulatedDevice dev(kSmall, population_preset("micron"), 5);
    dev.write_pattern(0xAA);
    const MeasurementSpec spec = reduced_latency(11);
    const BitStream a = dev.read_page(0, 7, spec);
    const BitStream b = dev.read_page(0, 7, spec);
    EXPECT_EQ(a, b);
}

TEST(Device, DeterministicAcrossInstancesAndReadOrder) {
    const PopulationConfig cfg = population_preset("samsung-a");
    SimulatedDevice dev1(kSmall, cfg, 99);
    SimulatedDevice dev2(kSmall, cfg, 99);
    dev1.write_pattern(0x55);
    dev2.write_pattern(0x55);
    const MeasurementSpec spec = reduced_latency(2);
    // Read rows in opposite orders; pages must match pairwise.
    for (std::uint32_t r = 0; r < kSmall.rows_per_bank; ++r) {
        const BitStream a = dev1.read_page(0, r, spec);
        const BitStream b = dev2.read_page(0, kSmall.rows_per_bank - 1 - r, spec);
        EXPECT_EQ(a, dev2.read_page(0, r, spec)) << r;
        (void)b;
    }
}

TEST(Device, SeedChangesOutputs) {
    SimulatedDevice dev1(kSmall, population_preset("micron"), 1);
    SimulatedDevice dev2(kSmall, population_preset("micron"), 2);
    const MeasurementSpec spec = reduced_latency(0);
    EXPECT_NE(dev1.read_page(0, 0, spec), dev2.read_page(0, 0, spec));
}

TEST(Device, PatternIndependentCellsIgnorePatternAndIndex) {
    SimulatedDevice dev(kSmall, population_preset("micron"), 21);
    int checked = 0;
    for (std::uint32_t c = 0; c < kSmall.cols_per_row && checked < 200; ++c) {
        const CellAddress cell{0, 3, c};
        if (dev.behavior(cell).cls != CellClass::PatternIndependent)
            continue;
        ++checked;
        const int stuck = dev.behavior(cell).stuck_value;
        for (std::uint8_t pattern : {0xFF, 0xAA, 0x55, 0x00}) {
            dev.write_pattern(pattern);
            for (std::uint32_t idx : {0u, 1u, 7u}) {
                EXPECT_EQ(dev.read_cell(cell, reduced_latency(idx)), stuck);
            }
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(Device, PatternDependentCellsComplementStoredBit) {
    SimulatedDevice dev(kSmall, population_preset("micron"), 33);
    int checked = 0;
    for (std::uint32_t r = 0; r < kSmall.rows_per_bank && checked < 50; ++r)
        for (std::uint32_t c = 0; c < kSmall.cols_per_row && checked < 50; ++c) {
            const CellAddress cell{0, r, c};
            if (dev.behavior(cell).cls != CellClass::PatternDependent)
                continue;
            ++checked;
            for (std::uint8_t pattern : {0xFF, 0xAA, 0x00}) {
                dev.write_pattern(pattern);
                const int stored = dev.stored_bit(c);
                // constant across measurement indices, complements stored bit
                EXPECT_EQ(dev.read_cell(cell, reduced_latency(0)), 1 - stored);
                EXPECT_EQ(dev.read_cell(cell, reduced_latency(9)), 1 - stored);
            }
        }
    EXPECT_GE(checked, 10);
}

TEST(Device, ConditionShiftIsMonotoneInVoltageAndTemperature) {
    SimulatedDevice dev({1, 1, 64}, population_preset("ideal"), 51);
    const CellAddress cell{0, 0, 9};
    ASSERT_EQ(dev.behavior(cell).cls, CellClass::Noisy);

    auto ones_fraction = [&](double dv, double dt) {
        const int reads = 40000;
        std::uint64_t ones = 0;
        for (int i = 0; i < reads; ++i) {
            MeasurementSpec spec = reduced_latency(std::uint32_t(i));
            spec.condition = {dv, dt};
            ones += std::uint64_t(dev.read_cell(cell, spec));
        }
        return double(ones) / reads;
    };

    const double base = ones_fraction(0, 0);
    const double hot = ones_fraction(0, 40);
    const double cold = ones_fraction(0, -40);
    const double high_v = ones_fraction(150, 0);
    const double low_v = ones_fraction(-150, 0);
    EXPECT_GT(hot, base + 0.02);  // k_t = 0.005/degC, +40C -> logit +0.2
    EXPECT_LT(cold, base - 0.02);
    EXPECT_GT(high_v, base + 0.03);  // k_v = 0.002/mV, +150mV -> logit +0.3
    EXPECT_LT(low_v, base - 0.03);

    // analytic check against the logit-shift law
    const double p = dev.behavior(cell).bias;
    const double expected_hot = 1.0 / (1.0 + std::exp(-(std::log(p / (1 - p)) + 0.2)));
    EXPECT_NEAR(hot, expected_hot, 0.01);
}

TEST(Device, OutOfRangeAddressesThrow) {
    SimulatedDevice dev({1, 2, 64}, population_preset("ideal"), 1);
    EXPECT_THROW(dev.read_page(0, 2, reduced_latency()), ValidationError);
    EXPECT_THROW(dev.read_page(1, 0, reduced_latency()), ValidationError);
    EXPECT_THROW(dev.read_cell({0, 0, 64}, reduced_latency()), ValidationError);
    EXPECT_THROW(dev.behavior({0, 5, 0}), ValidationError);
}
