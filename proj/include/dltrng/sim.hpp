#pragma once

// Behavioral model of a DRAM module read at reduced precharge latency.
// Every cell belongs to one of three classes: pattern-independent (stuck
// at a fixed value), pattern-dependent (a non-constant function of the
// stored bit; here the complement), or noisy (Bernoulli with a per-cell
// bias drawn from a Beta mixture). Cell behavior is a pure function of
// (seed, cell index, population config); noisy reads additionally key on
// the measurement index, so any read is reproducible in isolation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "dltrng/core.hpp"
#include "dltrng/rng.hpp"
#include "dltrng/special.hpp"

namespace dltrng {

enum class CellClass : std::uint8_t {
    PatternIndependent = 0,
    PatternDependent = 1,
    Noisy = 2,
};

struct CellBehavior {
    CellClass cls = CellClass::PatternIndependent;
    int stuck_value = 0;   // pattern-independent cells only
    double bias = 0.0;     // noisy cells only: P(read '1') at nominal condition
};

struct BetaComponent {
    double weight = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

/// Logit-shift sensitivity of noisy-cell biases to voltage/temperature
/// deltas. The magnitudes are free parameters of the model.
struct ConditionCoeffs {
    double k_v_per_mv = 0.002;
    double k_t_per_c = 0.005;
};

struct PopulationConfig {
    double frac_pattern_independent = 1.0;
    double frac_pattern_dependent = 0.0;
    double frac_noisy = 0.0;
    double stuck_value_weight = 0.5;  // P(stuck at '1') for pattern-independent cells
    std::vector<BetaComponent> noisy_bias_mixture;
    ConditionCoeffs condition_coeffs{};

    void validate() const {
        const double fsum = frac_pattern_independent + frac_pattern_dependent + frac_noisy;
        if (std::fabs(fsum - 1.0) > 1e-9)
            throw ValidationError("population: class fractions must sum to 1");
        if (frac_pattern_independent < 0 || frac_pattern_dependent < 0 || frac_noisy < 0)
            throw ValidationError("population: class fractions must be non-negative");
        if (stuck_value_weight < 0.0 || stuck_value_weight > 1.0)
            throw ValidationError("population: stuck_value_weight must be in [0, 1]");
        if (frac_noisy > 0.0) {
            if (noisy_bias_mixture.empty())
                throw ValidationError("population: noisy fraction > 0 requires a bias mixture");
            double wsum = 0.0;
            for (const auto& c : noisy_bias_mixture) {
                if (c.weight < 0.0)
                    throw ValidationError("population: mixture weights must be non-negative");
                if (c.alpha <= 0.0 || c.beta <= 0.0)
                    throw ValidationError("population: Beta parameters must be positive");
                wsum += c.weight;
            }
            if (std::fabs(wsum - 1.0) > 1e-9)
                throw ValidationError("population: mixture weights must sum to 1");
        }
    }
};

namespace preset_detail {

inline PopulationConfig make(double pd, double noisy, double stuck,
                             std::vector<BetaComponent> mix) {
    PopulationConfig cfg;
    cfg.frac_pattern_dependent = pd;
    cfg.frac_noisy = noisy;
    cfg.frac_pattern_independent = 1.0 - pd - noisy;
    cfg.stuck_value_weight = stuck;
    cfg.noisy_bias_mixture = std::move(mix);
    return cfg;
}

inline std::vector<BetaComponent> mix3(double w_lo, double w_hi, double lo_a, double lo_b,
                                       double hi_a, double hi_b, double mid_ab) {
    return {{w_lo, lo_a, lo_b},
            {w_hi, hi_a, hi_b},
            {1.0 - w_lo - w_hi, mid_ab, mid_ab}};
}

}  // namespace preset_detail

/// Named population presets. The Table-style per-bank presets are
/// calibrated so that a 20-measurement campaign reproduces the published
/// per-bank noisy-cell and filtered-cell densities; `micron` is the
/// bank-averaged default (82% / 17.5% / <1% observed classes) and `ideal`
/// is an all-noisy fair-coin population used as a statistical control.
inline PopulationConfig population_preset(const std::string& name) {
    using preset_detail::make;
    using preset_detail::mix3;
    if (name == "micron")
        return make(0.005, 0.29048636, 0.15,
                    mix3(0.74316086, 0.14430136, 1.5, 28.0, 28.0, 1.5, 46.0));
    if (name == "micron-a")
        return make(0.004, 0.02552435, 0.15,
                    mix3(0.71023508, 0.17755877, 1.5, 28.0, 28.0, 1.5, 46.0));
    if (name == "micron-b")
        return make(0.004, 0.15164297, 0.15,
                    mix3(0.47705194, 0.51680627, 1.5, 28.0, 28.0, 1.5, 46.0));
    if (name == "micron-c")
        return make(0.004, 0.17811799, 0.15,
                    mix3(0.47761133, 0.51741227, 1.5, 28.0, 28.0, 1.5, 46.0));
    if (name == "samsung-a")
        return make(0.005, 0.37310863, 0.85,
                    mix3(0.07976489, 0.91729619, 21.3630, 298.6370, 298.6370, 21.3630, 46.0));
    if (name == "samsung-b")
        return make(0.005, 0.54094597, 0.85,
                    mix3(0.07959564, 0.91534988, 21.3630, 298.6370, 298.6370, 21.3630, 46.0));
    if (name == "ideal")
        return make(0.0, 1.0, 0.5, {{1.0, 40000.0, 40000.0}});
    throw ValidationError("unknown population preset: " + name);
}

inline const std::vector<std::string>& population_preset_names() {
    static const std::vector<std::string> names = {
        "micron", "micron-a", "micron-b", "micron-c", "samsung-a", "samsung-b", "ideal"};
    return names;
}

class SimulatedDevice {
public:
    SimulatedDevice(DramGeometry geometry, PopulationConfig population, std::uint64_t seed)
        : geometry_(geometry), population_(std::move(population)), seed_(seed) {
        geometry_.validate();
        population_.validate();
        build_quantile_tables();
    }

    const DramGeometry& geometry() const { return geometry_; }
    const PopulationConfig& population() const { return population_; }
    std::uint64_t seed() const { return seed_; }
    std::uint8_t stored_pattern() const { return stored_pattern_; }

    /// Replicates the byte across every page; bit at column c is bit
    /// (7 - c mod 8) of the pattern.
    void write_pattern(std::uint8_t pattern) { stored_pattern_ = pattern; }

    int stored_bit(std::uint32_t col) const {
        return (stored_pattern_ >> (7 - (col & 7))) & 1;
    }

    /// Ground-truth behavior of one cell (test and calibration hook).
    CellBehavior behavior(const CellAddress& addr) const {
        check_range(addr);
        return behavior_by_index(cell_index(geometry_, addr));
    }

    int read_cell(const CellAddress& addr, const MeasurementSpec& spec) const {
        check_range(addr);
        spec.validate();
        return read_by_index(cell_index(geometry_, addr), addr.col, spec,
                             condition_shift(spec.condition));
    }

    BitStream read_page(std::uint32_t bank, std::uint32_t row, const MeasurementSpec& spec) const {
        if (bank >= geometry_.banks || row >= geometry_.rows_per_bank)
            throw ValidationError("read_page: address out of range");
        spec.validate();
        BitStream page(geometry_.cols_per_row);
        if (!spec.faults_active()) {
            for (std::uint32_t c = 0; c < geometry_.cols_per_row; ++c)
                page.set_bit(c, stored_bit(c));
            return page;
        }
        const double shift = condition_shift(spec.condition);
        std::uint64_t ci =
            (std::uint64_t(bank) * geometry_.rows_per_bank + row) * geometry_.cols_per_row;
        for (std::uint32_t c = 0; c < geometry_.cols_per_row; ++c, ++ci)
            page.set_bit(c, read_by_index(ci, c, spec, shift));
        return page;
    }

private:
    enum : std::uint64_t {
        kSaltClass = 0x11,
        kSaltStuck = 0x22,
        kSaltComponent = 0x33,
        kSaltBias = 0x44,
        kSaltRead = 0x55,
    };

    static constexpr int kQuantileKnots = 4096;
    static constexpr double kBiasFloor = 1e-9;

    void check_range(const CellAddress& addr) const {
        if (!addr.in_range(geometry_))
            throw ValidationError("cell address out of range");
    }

    double condition_shift(const OperatingCondition& cond) const {
        return population_.condition_coeffs.k_v_per_mv * cond.delta_v_mv +
               population_.condition_coeffs.k_t_per_c * cond.delta_t_c;
    }

    // Quantile tables are stored in logit space; Beta tails are near
    // exponential there, so linear interpolation stays accurate where the
    // plain CDF inverse is steep. Tables are shared across devices with the
    // same component shape.
    static std::shared_ptr<const std::vector<double>> quantile_table(double alpha, double beta) {
        static std::mutex mu;
        static std::map<std::pair<double, double>,
                        std::shared_ptr<const std::vector<double>>>
            cache;
        std::lock_guard<std::mutex> lock(mu);
        const auto key = std::make_pair(alpha, beta);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
        auto table = std::make_shared<std::vector<double>>(kQuantileKnots + 1);
        for (int i = 0; i <= kQuantileKnots; ++i) {
            double q = ibeta_inv(alpha, beta, double(i) / kQuantileKnots);
            q = std::clamp(q, kBiasFloor, 1.0 - kBiasFloor);
            (*table)[std::size_t(i)] = std::log(q / (1.0 - q));
        }
        cache[key] = table;
        return table;
    }

    void build_quantile_tables() {
        quantiles_.clear();
        cum_weights_.clear();
        double acc = 0.0;
        for (const auto& comp : population_.noisy_bias_mixture) {
            acc += comp.weight;
            cum_weights_.push_back(acc);
            quantiles_.push_back(quantile_table(comp.alpha, comp.beta));
        }
        if (!cum_weights_.empty())
            cum_weights_.back() = 1.0;
    }

    double sample_bias(std::uint64_t ci) const {
        const double uc = to_unit(keyed_u64(seed_, kSaltComponent, ci));
        std::size_t comp = 0;
        while (comp + 1 < cum_weights_.size() && uc >= cum_weights_[comp])
            ++comp;
        const double uq = to_unit(keyed_u64(seed_, kSaltBias, ci));
        const double pos = uq * kQuantileKnots;
        const std::size_t k = std::min<std::size_t>(std::size_t(pos), kQuantileKnots - 1);
        const double frac = pos - double(k);
        const auto& tab = quantiles_[comp];
        const double logit = tab[k] + frac * (tab[k + 1] - tab[k]);
        return 1.0 / (1.0 + std::exp(-logit));
    }

    CellBehavior behavior_by_index(std::uint64_t ci) const {
        CellBehavior b;
        const double u = to_unit(keyed_u64(seed_, kSaltClass, ci));
        if (u < population_.frac_pattern_independent) {
            b.cls = CellClass::PatternIndependent;
            b.stuck_value =
                to_unit(keyed_u64(seed_, kSaltStuck, ci)) < population_.stuck_value_weight ? 1 : 0;
        } else if (u < population_.frac_pattern_independent + population_.frac_pattern_dependent) {
            b.cls = CellClass::PatternDependent;
        } else {
            b.cls = CellClass::Noisy;
            b.bias = sample_bias(ci);
        }
        return b;
    }

    int read_by_index(std::uint64_t ci, std::uint32_t col, const MeasurementSpec& spec,
                      double shift) const {
        if (!spec.faults_active())
            return stored_bit(col);
        const double u = to_unit(keyed_u64(seed_, kSaltClass, ci));
        if (u < population_.frac_pattern_independent)
            return to_unit(keyed_u64(seed_, kSaltStuck, ci)) < population_.stuck_value_weight ? 1
                                                                                              : 0;
        if (u < population_.frac_pattern_independent + population_.frac_pattern_dependent)
            return 1 - stored_bit(col);
        double p = sample_bias(ci);
        if (shift != 0.0) {
            const double logit = std::log(p / (1.0 - p)) + shift;
            p = 1.0 / (1.0 + std::exp(-logit));
        }
        const double ur = to_unit(keyed_u64(seed_, kSaltRead, ci, spec.measurement_index));
        return ur < p ? 1 : 0;
    }

    DramGeometry geometry_;
    PopulationConfig population_;
    std::uint64_t seed_ = 0;
    std::uint8_t stored_pattern_ = 0x00;
    std::vector<double> cum_weights_;
    std::vector<std::vector<double>> quantiles_;
};

/// Convenience factory mirroring the device constructor.
inline SimulatedDevice build_device(const DramGeometry& geometry,
                                    const PopulationConfig& population, std::uint64_t seed) {
    return SimulatedDevice(geometry, population, seed);
}

}  // namespace dltrng
