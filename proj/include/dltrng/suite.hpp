#pragma once

// Batch scoring of the statistical tests over a set of equal-length
// streams: per test instance, the decile chi-square uniformity p-value and
// the proportion of streams passing at significance alpha. Tests producing
// several p-values per stream (templates, excursion states, the two serial
// and cusum variants) are folded into one reported line by worst case.
// Streams that lack data for a test are excluded from that test's
// proportion denominator; the uniformity p is only computed when every
// stream contributed.
//
// Also hosts the per-cell frequency test: ones-fraction of each enrolled
// cell over n fresh reads, compared against the normal approximation
// N(50%, 50%/sqrt(n)).

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dltrng/core.hpp"
#include "dltrng/extract.hpp"
#include "dltrng/filter.hpp"
#include "dltrng/measurement.hpp"
#include "dltrng/nist.hpp"
#include "dltrng/special.hpp"

namespace dltrng {

enum class ProportionRule {
    Paper,     // at least 80% of scored streams pass (8/10 for 10 streams)
    NistBand,  // (1-alpha) - 3 sqrt(alpha(1-alpha)/s) lower bound
};

struct SuiteConfig {
    TestParams params{};
    double alpha = 0.01;
    ProportionRule rule = ProportionRule::Paper;
    double min_uniformity_p = 0.0001;
};

/// Decile chi-square uniformity p-value over a sample of p-values.
inline double uniformity_p_value(std::span<const double> p_values) {
    if (p_values.empty())
        throw ValidationError("uniformity: empty sample");
    std::array<std::uint64_t, 10> deciles{};
    for (double p : p_values) {
        int pos = int(p * 10.0);
        if (pos > 9)
            pos = 9;
        if (pos < 0)
            pos = 0;
        ++deciles[std::size_t(pos)];
    }
    const double expect = double(p_values.size()) / 10.0;
    double chi2 = 0.0;
    for (std::uint64_t f : deciles)
        chi2 += (double(f) - expect) * (double(f) - expect) / expect;
    return igamc(4.5, chi2 / 2.0);
}

struct InstanceLine {
    double uniformity_p = 0.0;
    bool uniformity_computed = false;
    std::uint32_t passed = 0;
    std::uint32_t valid = 0;
    bool pass = false;
};

struct TestLine {
    TestId id{};
    bool insufficient = false;  // no stream had data at all
    double uniformity_p = 0.0;  // worst instance (when computed)
    bool uniformity_computed = false;
    std::uint32_t passed = 0;  // worst instance proportion
    std::uint32_t valid = 0;
    bool verdict_pass = false;
    std::string note;
    std::vector<InstanceLine> instances;
    std::vector<std::vector<double>> per_stream_p;  // [stream][instance], empty if no data
};

struct TestReport {
    std::uint32_t streams = 0;
    std::uint64_t stream_bits = 0;
    SuiteConfig config{};
    std::vector<TestLine> lines;  // kAllTests order
    bool all_pass = false;
};

namespace suite_detail {

inline bool proportion_passes(const SuiteConfig& cfg, std::uint32_t passed, std::uint32_t valid) {
    if (valid == 0)
        return false;
    const double prop = double(passed) / double(valid);
    if (cfg.rule == ProportionRule::Paper)
        return prop >= 0.8 - 1e-12;
    const double p_hat = 1.0 - cfg.alpha;
    return prop >= p_hat - 3.0 * std::sqrt(p_hat * cfg.alpha / double(valid));
}

}  // namespace suite_detail

inline TestReport run_suite(std::span<const BitStream> streams, const SuiteConfig& cfg = {}) {
    if (streams.size() < 2)
        throw ValidationError("suite: need at least two streams");
    for (const auto& s : streams)
        if (s.size() != streams.front().size())
            throw ValidationError("suite: streams must have equal lengths");

    TestReport report;
    report.streams = std::uint32_t(streams.size());
    report.stream_bits = streams.front().size();
    report.config = cfg;
    report.all_pass = true;

    for (TestId id : kAllTests) {
        TestLine line;
        line.id = id;

        std::vector<TestResult> results;
        results.reserve(streams.size());
        for (const auto& s : streams)
            results.push_back(run_test(id, s, cfg.params));

        std::size_t instances = 0;
        for (const auto& r : results) {
            if (r.status == TestStatus::Ok)
                instances = std::max(instances, r.p_values.size());
            else if (!r.note.empty() && line.note.empty())
                line.note = r.note;
            line.per_stream_p.push_back(r.p_values);
        }
        if (instances == 0) {
            line.insufficient = true;
            report.lines.push_back(std::move(line));
            continue;
        }

        bool all_instances_pass = true;
        for (std::size_t j = 0; j < instances; ++j) {
            InstanceLine inst;
            std::vector<double> sample;
            for (const auto& r : results) {
                if (r.status != TestStatus::Ok)
                    continue;
                ++inst.valid;
                const double p = r.p_values.at(j);
                sample.push_back(p);
                if (p >= cfg.alpha)
                    ++inst.passed;
            }
            if (inst.valid == streams.size()) {
                inst.uniformity_p = uniformity_p_value(sample);
                inst.uniformity_computed = true;
            }
            inst.pass = suite_detail::proportion_passes(cfg, inst.passed, inst.valid) &&
                        (!inst.uniformity_computed || inst.uniformity_p >= cfg.min_uniformity_p);
            all_instances_pass = all_instances_pass && inst.pass;
            line.instances.push_back(inst);
        }

        // Reported row: worst case over instances.
        const InstanceLine* worst_prop = nullptr;
        for (const auto& inst : line.instances) {
            if (!worst_prop || double(inst.passed) * worst_prop->valid <
                                   double(worst_prop->passed) * inst.valid)
                worst_prop = &inst;
        }
        line.passed = worst_prop->passed;
        line.valid = worst_prop->valid;
        for (const auto& inst : line.instances) {
            if (!inst.uniformity_computed)
                continue;
            if (!line.uniformity_computed || inst.uniformity_p < line.uniformity_p) {
                line.uniformity_p = inst.uniformity_p;
                line.uniformity_computed = true;
            }
        }
        line.verdict_pass = all_instances_pass;
        report.all_pass = report.all_pass && line.verdict_pass;
        report.lines.push_back(std::move(line));
    }
    return report;
}

// ---- per-cell CLT frequency test ----

struct CltReport {
    std::uint32_t n = 0;                    // fresh reads per cell
    std::vector<std::uint64_t> histogram;   // bins by ones-count 0..n
    std::uint64_t cells = 0;
    double mu_percent = 0.0;
    double sigma_percent = 0.0;
    double mu0_percent = 50.0;
    double sigma0_percent = 0.0;  // 100 * 0.5 / sqrt(n)
};

inline CltReport clt_frequency_test(MeasurementSource& source, const FilterSet& fset,
                                    std::uint32_t n, const MeasurementSpec& spec) {
    if (fset.empty())
        throw ValidationError("clt test: empty filter set");
    if (n < 2)
        throw ValidationError("clt test: need at least two measurements per cell");
    if (!(source.geometry() == fset.geometry))
        throw GeometryMismatchError("clt test: source geometry does not match enrollment");

    std::vector<std::uint16_t> ones(fset.members.size(), 0);
    // Page-grouped reads, one pass per measurement index.
    struct Group {
        std::uint32_t bank, row;
        std::size_t first;
        std::vector<std::uint32_t> cols;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < fset.members.size(); ++i) {
        const auto& a = fset.members[i];
        if (groups.empty() || groups.back().bank != a.bank || groups.back().row != a.row)
            groups.push_back({a.bank, a.row, i, {}});
        groups.back().cols.push_back(a.col);
    }
    MeasurementSpec round_spec = spec;
    for (std::uint32_t r = 0; r < n; ++r) {
        round_spec.measurement_index = spec.measurement_index + r;
        for (const auto& g : groups) {
            const BitStream bits = source.read_cells(round_spec, g.bank, g.row, g.cols);
            for (std::size_t i = 0; i < g.cols.size(); ++i)
                ones[g.first + i] += std::uint16_t(bits.bit(i));
        }
    }

    CltReport rep;
    rep.n = n;
    rep.cells = fset.members.size();
    rep.histogram.assign(n + 1, 0);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint16_t k : ones) {
        ++rep.histogram[k];
        const double f = double(k) / double(n);
        sum += f;
        sum2 += f * f;
    }
    const double cells = double(rep.cells);
    const double mean = sum / cells;
    const double var = cells > 1 ? (sum2 - cells * mean * mean) / (cells - 1.0) : 0.0;
    rep.mu_percent = 100.0 * mean;
    rep.sigma_percent = 100.0 * std::sqrt(std::max(var, 0.0));
    rep.sigma0_percent = 100.0 * 0.5 / std::sqrt(double(n));
    return rep;
}

}  // namespace dltrng
