#pragma once

// Classifies every cell of a measurement campaign into the reduced-latency
// taxonomy: any variation within the repeats of one pattern marks a cell
// noisy; otherwise differing constants across patterns mark it pattern
// dependent; otherwise it is pattern independent. Noisy cells carry their
// per-pattern ones counts for the later bias filter.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dltrng/core.hpp"
#include "dltrng/measurement.hpp"

namespace dltrng {

struct NoisyCellStats {
    CellAddress addr;
    std::span<const std::uint16_t> per_pattern_ones;  // parallel to patterns()
    std::uint32_t total_ones = 0;
    std::uint32_t total_measurements = 0;
};

class CharacterizationMap {
public:
    CharacterizationMap() = default;

    const DramGeometry& geometry() const { return geometry_; }
    const std::vector<std::uint8_t>& patterns() const { return patterns_; }
    std::uint32_t repeats_per_pattern() const { return repeats_; }
    std::uint32_t total_measurements() const {
        return repeats_ * std::uint32_t(patterns_.size());
    }

    /// True when every cell echoed the written pattern in every dump
    /// (full-latency read); no class statistics exist in that case.
    bool fault_free() const { return fault_free_; }

    /// Per-cell class queries need the in-memory class array; maps loaded
    /// from a DCM1 file carry only aggregate counts and noisy stats.
    bool has_cell_classes() const { return !classes_.empty(); }

    CellClass cell_class(const CellAddress& a) const {
        if (classes_.empty())
            throw ValidationError("per-cell classes are not available on this map");
        const std::uint64_t ci = cell_index(geometry_, a);
        return CellClass((classes_[ci >> 2] >> ((ci & 3) * 2)) & 3);
    }

    std::uint64_t class_count(std::uint32_t bank, CellClass cls) const {
        return bank_counts_[bank][std::size_t(cls)];
    }

    std::uint64_t noisy_cell_count() const { return noisy_addrs_.size(); }

    NoisyCellStats noisy_stats(std::uint64_t i) const {
        const std::size_t np = patterns_.size();
        std::span<const std::uint16_t> counts(noisy_counts_.data() + i * np, np);
        std::uint32_t total = 0;
        for (auto c : counts)
            total += c;
        return {noisy_addrs_[i], counts, total, total_measurements()};
    }

    const std::vector<CellAddress>& noisy_addresses() const { return noisy_addrs_; }

private:
    friend CharacterizationMap classify(std::span<const MeasurementDump>);
    friend void write_characterization(const std::filesystem::path&, const CharacterizationMap&);
    friend CharacterizationMap read_characterization(const std::filesystem::path&);

    void set_class(std::uint64_t ci, CellClass cls) {
        classes_[ci >> 2] |= std::uint8_t(std::uint8_t(cls) << ((ci & 3) * 2));
    }

    DramGeometry geometry_{};
    std::vector<std::uint8_t> patterns_;
    std::uint32_t repeats_ = 0;
    bool fault_free_ = false;
    std::vector<std::uint8_t> classes_;                     // 2 bits per cell
    std::vector<std::array<std::uint64_t, 3>> bank_counts_; // per bank, per class
    std::vector<CellAddress> noisy_addrs_;                  // canonical order
    std::vector<std::uint16_t> noisy_counts_;               // stride = patterns.size()
};

/// Classifies a campaign. Needs at least two distinct patterns and two
/// repeats per pattern; anything less cannot separate the classes.
inline CharacterizationMap classify(std::span<const MeasurementDump> dumps) {
    if (dumps.empty())
        throw ValidationError("classify: empty campaign");
    const DramGeometry geom = dumps.front().geometry;
    for (const auto& d : dumps)
        if (!(d.geometry == geom))
            throw GeometryMismatchError("classify: geometry mismatch among dumps");

    // Group dump indices by pattern; order within a pattern is irrelevant.
    std::map<std::uint8_t, std::vector<std::size_t>> by_pattern;
    for (std::size_t i = 0; i < dumps.size(); ++i)
        by_pattern[dumps[i].spec.input_pattern].push_back(i);
    if (by_pattern.size() < 2)
        throw ValidationError("classify: need at least two distinct patterns");
    const std::size_t repeats = by_pattern.begin()->second.size();
    for (const auto& [pat, idx] : by_pattern)
        if (idx.size() != repeats)
            throw ValidationError("classify: unequal repeats across patterns");
    if (repeats < 2)
        throw ValidationError("classify: need at least two repeats per pattern");
    if (repeats > 0xFFFF)
        throw ValidationError("classify: repeats exceed supported maximum");

    CharacterizationMap map;
    map.geometry_ = geom;
    map.repeats_ = std::uint32_t(repeats);
    for (const auto& [pat, idx] : by_pattern)
        map.patterns_.push_back(pat);
    const std::size_t np = map.patterns_.size();

    map.classes_.assign((cell_count(geom) + 3) / 4, 0);
    map.bank_counts_.assign(geom.banks, {0, 0, 0});

    // Fault-free detection: every page of every dump equals the replicated
    // written pattern byte.
    bool all_echo = true;
    for (const auto& d : dumps) {
        for (std::uint8_t byte : d.payload) {
            if (byte != d.spec.input_pattern) {
                all_echo = false;
                break;
            }
        }
        if (!all_echo)
            break;
    }
    if (all_echo) {
        map.fault_free_ = true;
        return map;
    }

    const std::uint32_t cols = geom.cols_per_row;
    std::vector<std::uint16_t> ones(np * cols);  // [pattern][col]

    for (std::uint32_t bank = 0; bank < geom.banks; ++bank) {
        auto& counts = map.bank_counts_[bank];
        for (std::uint32_t row = 0; row < geom.rows_per_bank; ++row) {
            std::fill(ones.begin(), ones.end(), 0);
            std::size_t pi = 0;
            for (const auto& [pat, idx] : by_pattern) {
                std::uint16_t* o = ones.data() + pi * cols;
                for (std::size_t di : idx) {
                    const std::uint8_t* page =
                        dumps[di].payload.data() + dumps[di].page_offset(bank, row);
                    for (std::uint32_t c = 0; c < cols; ++c)
                        o[c] += std::uint16_t((page[c >> 3] >> (7 - (c & 7))) & 1);
                }
                ++pi;
            }
            std::uint64_t ci = (std::uint64_t(bank) * geom.rows_per_bank + row) * cols;
            for (std::uint32_t c = 0; c < cols; ++c, ++ci) {
                bool noisy = false;
                bool differs = false;
                int first_value = -1;
                for (std::size_t p = 0; p < np; ++p) {
                    const std::uint16_t k = ones[p * cols + c];
                    if (k != 0 && k != repeats) {
                        noisy = true;
                        break;
                    }
                    const int v = k == 0 ? 0 : 1;
                    if (first_value < 0)
                        first_value = v;
                    else if (v != first_value)
                        differs = true;
                }
                CellClass cls;
                if (noisy) {
                    cls = CellClass::Noisy;
                    map.noisy_addrs_.push_back({bank, row, c});
                    for (std::size_t p = 0; p < np; ++p)
                        map.noisy_counts_.push_back(ones[p * cols + c]);
                } else {
                    cls = differs ? CellClass::PatternDependent : CellClass::PatternIndependent;
                }
                map.set_class(ci, cls);
                ++counts[std::size_t(cls)];
            }
        }
    }
    return map;
}

struct ClassFractions {
    // Order: pattern-independent, pattern-dependent, noisy.
    std::vector<std::array<double, 3>> per_bank;
    std::array<double, 3> overall{};
};

inline ClassFractions class_fractions(const CharacterizationMap& map) {
    if (map.fault_free())
        throw ValidationError("class_fractions: fault-free campaign has no class statistics");
    if (cell_count(map.geometry()) == 0)
        throw ValidationError("class_fractions: empty map");
    ClassFractions out;
    const double bank_cells =
        double(map.geometry().rows_per_bank) * map.geometry().cols_per_row;
    std::array<double, 3> totals{};
    for (std::uint32_t b = 0; b < map.geometry().banks; ++b) {
        std::array<double, 3> f{};
        for (int c = 0; c < 3; ++c) {
            f[c] = double(map.class_count(b, CellClass(c))) / bank_cells;
            totals[c] += double(map.class_count(b, CellClass(c)));
        }
        out.per_bank.push_back(f);
    }
    const double all = double(cell_count(map.geometry()));
    for (int c = 0; c < 3; ++c)
        out.overall[c] = totals[c] / all;
    return out;
}

/// Histogram of per-noisy-cell ones counts: bin k holds the number of
/// noisy cells that read '1' in exactly k of the campaign's measurements
/// (bin width 1/total_measurements in ones-fraction).
inline std::vector<std::uint64_t> ones_histogram(const CharacterizationMap& map) {
    if (map.noisy_cell_count() == 0)
        throw ValidationError("ones_histogram: no noisy cells");
    std::vector<std::uint64_t> bins(map.total_measurements() + 1, 0);
    for (std::uint64_t i = 0; i < map.noisy_cell_count(); ++i)
        ++bins[map.noisy_stats(i).total_ones];
    return bins;
}

// ---- DCM1 characterization file (binary, little-endian) ----
// Persists aggregate class counts and the noisy-cell statistics; the
// per-cell class array is not stored (it can be gigabytes at full module
// scale and nothing downstream needs it).

inline void write_characterization(const std::filesystem::path& path,
                                   const CharacterizationMap& map) {
    using namespace dump_detail;
    std::vector<std::uint8_t> out;
    const std::size_t np = map.patterns_.size();
    out.reserve(64 + map.noisy_addrs_.size() * (8 + 2 * np));
    out.insert(out.end(), {'D', 'C', 'M', '1'});
    put_u16(out, 1);
    out.push_back(map.fault_free_ ? 1 : 0);
    out.push_back(std::uint8_t(map.geometry_.banks));
    put_u32(out, map.geometry_.rows_per_bank);
    put_u32(out, map.geometry_.cols_per_row);
    out.push_back(std::uint8_t(np));
    for (std::uint8_t p : map.patterns_)
        out.push_back(p);
    put_u16(out, std::uint16_t(map.repeats_));
    for (const auto& bc : map.bank_counts_)
        for (std::uint64_t c : bc)
            put_u64(out, c);
    put_u64(out, map.noisy_addrs_.size());
    for (std::size_t i = 0; i < map.noisy_addrs_.size(); ++i) {
        put_u64(out, cell_index(map.geometry_, map.noisy_addrs_[i]));
        for (std::size_t p = 0; p < np; ++p)
            put_u16(out, map.noisy_counts_[i * np + p]);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), long(out.size()));
    if (!f)
        throw IoError("short write: " + path.string());
}

inline CharacterizationMap read_characterization(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open for reading: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    dump_detail::Reader r(bytes.data(), bytes.size());
    const auto* magic = r.take(4);
    if (!(magic[0] == 'D' && magic[1] == 'C' && magic[2] == 'M' && magic[3] == '1'))
        throw BadMagicError("not a DCM1 characterization file");
    if (r.u16() != 1)
        throw VersionMismatchError("unsupported DCM1 version");
    CharacterizationMap map;
    map.fault_free_ = r.u8() != 0;
    map.geometry_.banks = r.u8();
    map.geometry_.rows_per_bank = r.u32();
    map.geometry_.cols_per_row = r.u32();
    map.geometry_.validate();
    const std::size_t np = r.u8();
    for (std::size_t i = 0; i < np; ++i)
        map.patterns_.push_back(r.u8());
    map.repeats_ = r.u16();
    map.bank_counts_.assign(map.geometry_.banks, {0, 0, 0});
    for (auto& bc : map.bank_counts_)
        for (auto& c : bc)
            c = r.u64();
    const std::uint64_t noisy = r.u64();
    map.noisy_addrs_.reserve(noisy);
    map.noisy_counts_.reserve(noisy * np);
    const std::uint64_t cols = map.geometry_.cols_per_row;
    const std::uint64_t rows = map.geometry_.rows_per_bank;
    for (std::uint64_t i = 0; i < noisy; ++i) {
        const std::uint64_t ci = r.u64();
        CellAddress a;
        a.col = std::uint32_t(ci % cols);
        a.row = std::uint32_t((ci / cols) % rows);
        a.bank = std::uint32_t(ci / (cols * rows));
        if (!a.in_range(map.geometry_))
            throw GeometryMismatchError("DCM1 noisy cell index out of range");
        map.noisy_addrs_.push_back(a);
        for (std::size_t p = 0; p < np; ++p)
            map.noisy_counts_.push_back(r.u16());
    }
    return map;
}

}  // namespace dltrng
