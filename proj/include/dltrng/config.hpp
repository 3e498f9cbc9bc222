#pragma once

// Pipeline configuration: one versioned JSON document drives every stage.
// Validation reports every violated constraint at once. Two digests are
// derived from the canonical form: the full config digest (stamped into
// outputs for reproducibility) and the device digest (geometry, population,
// seed, latency - the identity that enrollment and generation must share).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dltrng/core.hpp"
#include "dltrng/extract.hpp"
#include "dltrng/filter.hpp"
#include "dltrng/sha2.hpp"
#include "dltrng/sim.hpp"
#include "dltrng/suite.hpp"

namespace dltrng {

struct SuiteSettings {
    std::uint32_t streams = 10;
    std::uint64_t stream_bits = 1000000;
    double alpha = 0.01;
    ProportionRule rule = ProportionRule::Paper;
};

struct PipelineConfig {
    static constexpr int kVersion = 1;

    DramGeometry geometry{1, 1u << 14, 1u << 16};
    std::string preset = "micron";                     // ignored when inline set
    std::optional<PopulationConfig> population_inline; // overrides preset
    std::uint64_t seed = 1;
    double t_rp_fraction = 0.19;
    std::vector<std::uint8_t> patterns = {0xFF, 0xAA, 0x55, 0x00};
    std::uint32_t repeats = 5;
    FilterWindow window{};
    WindowMode window_mode = WindowMode::Pooled;
    ConditionerConfig conditioner{};
    SuiteSettings suite{};
    OperatingCondition condition{};
    std::vector<OperatingCondition> sweep_conditions;  // optional, `test` sweeps

    PopulationConfig population() const {
        if (population_inline)
            return *population_inline;
        return population_preset(preset);
    }

    /// Collects every violated constraint into one error.
    void validate() const {
        std::vector<std::string> problems;
        auto check = [&](auto&& fn) {
            try {
                fn();
            } catch (const Error& e) {
                problems.emplace_back(e.what());
            }
        };
        check([&] { geometry.validate(); });
        check([&] { population().validate(); });
        check([&] {
            MeasurementSpec spec;
            spec.t_rp_fraction = t_rp_fraction;
            spec.condition = condition;
            spec.validate();
        });
        check([&] { window.validate(); });
        for (const auto& c : sweep_conditions)
            check([&] { c.validate(); });
        if (patterns.empty())
            problems.emplace_back("config: patterns must not be empty");
        if (repeats < 1)
            problems.emplace_back("config: repeats must be >= 1");
        if (suite.streams < 2)
            problems.emplace_back("config: suite.streams must be >= 2");
        if (suite.stream_bits < 1)
            problems.emplace_back("config: suite.stream_bits must be >= 1");
        if (!(suite.alpha > 0.0 && suite.alpha < 1.0))
            problems.emplace_back("config: suite.alpha must be in (0, 1)");
        if (!problems.empty()) {
            std::string msg = "configuration invalid:";
            for (const auto& p : problems)
                msg += "\n  - " + p;
            throw ValidationError(msg);
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["version"] = kVersion;
        j["geometry"] = {{"banks", geometry.banks},
                         {"rows_per_bank", geometry.rows_per_bank},
                         {"cols_per_row", geometry.cols_per_row}};
        if (population_inline)
            j["population"] = population_to_json(*population_inline);
        else
            j["population"] = preset;
        j["seed"] = seed;
        j["t_rp_fraction"] = t_rp_fraction;
        j["patterns"] = patterns;
        j["repeats"] = repeats;
        j["filter_window"] = {{"lo", window.lo},
                              {"hi", window.hi},
                              {"mode", window_mode == WindowMode::Pooled ? "pooled"
                                                                         : "per-pattern"}};
        j["conditioner"] = conditioner.name();
        j["suite"] = {{"streams", suite.streams},
                      {"stream_bits", suite.stream_bits},
                      {"alpha", suite.alpha},
                      {"proportion_rule",
                       suite.rule == ProportionRule::Paper ? "paper" : "nist-band"}};
        j["condition"] = condition_to_json(condition);
        if (!sweep_conditions.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : sweep_conditions)
                arr.push_back(condition_to_json(c));
            j["conditions"] = arr;
        }
        return j;
    }

    static PipelineConfig from_json(const nlohmann::json& j) {
        if (!j.contains("version") || !j["version"].is_number_integer())
            throw ValidationError("config: missing integer 'version'");
        if (j["version"].get<int>() != kVersion)
            throw ValidationError("config: unsupported version " +
                                  std::to_string(j["version"].get<int>()));
        PipelineConfig cfg;
        if (j.contains("geometry")) {
            const auto& g = j["geometry"];
            cfg.geometry.banks = g.value("banks", cfg.geometry.banks);
            cfg.geometry.rows_per_bank = g.value("rows_per_bank", cfg.geometry.rows_per_bank);
            cfg.geometry.cols_per_row = g.value("cols_per_row", cfg.geometry.cols_per_row);
        }
        if (j.contains("population")) {
            if (j["population"].is_string())
                cfg.preset = j["population"].get<std::string>();
            else
                cfg.population_inline = population_from_json(j["population"]);
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.t_rp_fraction = j.value("t_rp_fraction", cfg.t_rp_fraction);
        if (j.contains("patterns"))
            cfg.patterns = j["patterns"].get<std::vector<std::uint8_t>>();
        cfg.repeats = j.value("repeats", cfg.repeats);
        if (j.contains("filter_window")) {
            const auto& w = j["filter_window"];
            cfg.window.lo = w.value("lo", cfg.window.lo);
            cfg.window.hi = w.value("hi", cfg.window.hi);
            const std::string mode = w.value("mode", "pooled");
            if (mode == "pooled")
                cfg.window_mode = WindowMode::Pooled;
            else if (mode == "per-pattern")
                cfg.window_mode = WindowMode::PerPattern;
            else
                throw ValidationError("config: filter_window.mode must be pooled or per-pattern");
        }
        if (j.contains("conditioner"))
            cfg.conditioner = ConditionerConfig::from_name(j["conditioner"].get<std::string>());
        if (j.contains("suite")) {
            const auto& s = j["suite"];
            cfg.suite.streams = s.value("streams", cfg.suite.streams);
            cfg.suite.stream_bits = s.value("stream_bits", cfg.suite.stream_bits);
            cfg.suite.alpha = s.value("alpha", cfg.suite.alpha);
            const std::string rule = s.value("proportion_rule", "paper");
            if (rule == "paper")
                cfg.suite.rule = ProportionRule::Paper;
            else if (rule == "nist-band")
                cfg.suite.rule = ProportionRule::NistBand;
            else
                throw ValidationError("config: suite.proportion_rule must be paper or nist-band");
        }
        if (j.contains("condition"))
            cfg.condition = condition_from_json(j["condition"]);
        if (j.contains("conditions"))
            for (const auto& c : j["conditions"])
                cfg.sweep_conditions.push_back(condition_from_json(c));
        return cfg;
    }

    static PipelineConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open config: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("config parse error in " + path.string() + ": " + e.what());
        }
        return from_json(j);
    }

    /// Digest of the full canonical config document.
    std::string config_digest() const {
        return sha256_hex(to_json().dump()).substr(0, 16);
    }

    /// Digest of the device identity: geometry, resolved population, seed
    /// and latency setting. Enrollment and generated bitstreams must agree
    /// on this to be combined.
    std::string device_digest() const {
        nlohmann::json j;
        j["geometry"] = {{"banks", geometry.banks},
                         {"rows_per_bank", geometry.rows_per_bank},
                         {"cols_per_row", geometry.cols_per_row}};
        j["population"] = population_to_json(population());
        j["seed"] = seed;
        j["t_rp_fraction"] = t_rp_fraction;
        return sha256_hex(j.dump()).substr(0, 16);
    }

    static nlohmann::json condition_to_json(const OperatingCondition& c) {
        return {{"delta_v_mv", c.delta_v_mv}, {"delta_t_c", c.delta_t_c}};
    }
    static OperatingCondition condition_from_json(const nlohmann::json& j) {
        OperatingCondition c;
        c.delta_v_mv = j.value("delta_v_mv", 0.0);
        c.delta_t_c = j.value("delta_t_c", 0.0);
        return c;
    }

    static nlohmann::json population_to_json(const PopulationConfig& p) {
        nlohmann::json mix = nlohmann::json::array();
        for (const auto& c : p.noisy_bias_mixture)
            mix.push_back({{"weight", c.weight}, {"alpha", c.alpha}, {"beta", c.beta}});
        return {{"frac_pattern_independent", p.frac_pattern_independent},
                {"frac_pattern_dependent", p.frac_pattern_dependent},
                {"frac_noisy", p.frac_noisy},
                {"stuck_value_weight", p.stuck_value_weight},
                {"noisy_bias_mixture", mix},
                {"condition_coeffs",
                 {{"k_v_per_mv", p.condition_coeffs.k_v_per_mv},
                  {"k_t_per_c", p.condition_coeffs.k_t_per_c}}}};
    }

    static PopulationConfig population_from_json(const nlohmann::json& j) {
        PopulationConfig p;
        p.frac_pattern_independent = j.value("frac_pattern_independent", 0.0);
        p.frac_pattern_dependent = j.value("frac_pattern_dependent", 0.0);
        p.frac_noisy = j.value("frac_noisy", 0.0);
        p.stuck_value_weight = j.value("stuck_value_weight", 0.5);
        if (j.contains("noisy_bias_mixture"))
            for (const auto& c : j["noisy_bias_mixture"])
                p.noisy_bias_mixture.push_back(
                    {c.value("weight", 1.0), c.value("alpha", 1.0), c.value("beta", 1.0)});
        if (j.contains("condition_coeffs")) {
            p.condition_coeffs.k_v_per_mv = j["condition_coeffs"].value("k_v_per_mv", 0.002);
            p.condition_coeffs.k_t_per_c = j["condition_coeffs"].value("k_t_per_c", 0.005);
        }
        return p;
    }

    /// Measurement spec for this config at a given condition and index.
    MeasurementSpec spec_at(const OperatingCondition& cond, std::uint32_t index = 0) const {
        MeasurementSpec spec;
        spec.t_rp_fraction = t_rp_fraction;
        spec.condition = cond;
        spec.measurement_index = index;
        return spec;
    }
};

}  // namespace dltrng
