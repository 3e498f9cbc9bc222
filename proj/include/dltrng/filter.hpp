#pragma once

// Temporal-bias filter: keeps the noisy cells whose pooled ones-fraction
// over the campaign lies inside the window (default [0.40, 0.60], bounds
// inclusive), and persists the selection as a plain-text enrollment
// database. Enrollment happens once; generation replays it.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dltrng/characterize.hpp"
#include "dltrng/core.hpp"

namespace dltrng {

struct FilterWindow {
    double lo = 0.40;
    double hi = 0.60;

    void validate() const {
        if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
            throw ValidationError("filter window: need 0 <= lo < hi <= 1");
    }

    bool contains(double fraction) const { return fraction >= lo && fraction <= hi; }
};

enum class WindowMode {
    Pooled,      // ones-fraction pooled across all patterns (default)
    PerPattern,  // every pattern's own fraction must lie in the window
};

struct PageStats {
    double avg_bits_per_occupied_page = 0.0;
    double occupied_page_fraction = 0.0;
};

struct FilterSet {
    DramGeometry geometry{};
    FilterWindow window{};
    std::uint32_t total_measurements = 0;
    std::string campaign_id;
    std::vector<CellAddress> members;  // canonical (bank,row,col) order

    bool empty() const { return members.empty(); }
};

inline FilterSet select_unbiased(const CharacterizationMap& map,
                                 FilterWindow window = FilterWindow{},
                                 WindowMode mode = WindowMode::Pooled,
                                 std::string campaign_id = "") {
    window.validate();
    FilterSet out;
    out.geometry = map.geometry();
    out.window = window;
    out.total_measurements = map.total_measurements();
    out.campaign_id = std::move(campaign_id);
    const std::uint64_t n = map.noisy_cell_count();
    for (std::uint64_t i = 0; i < n; ++i) {
        const NoisyCellStats st = map.noisy_stats(i);
        bool keep;
        if (mode == WindowMode::Pooled) {
            keep = window.contains(double(st.total_ones) / double(st.total_measurements));
        } else {
            keep = true;
            const double repeats = double(map.repeats_per_pattern());
            for (std::uint16_t k : st.per_pattern_ones)
                if (!window.contains(double(k) / repeats)) {
                    keep = false;
                    break;
                }
        }
        if (keep)
            out.members.push_back(st.addr);  // already in canonical order
    }
    return out;
}

/// Average members per occupied page (pages with >= 1 member only) and the
/// fraction of all pages that are occupied.
inline PageStats page_stats(const FilterSet& fset, const DramGeometry& geometry) {
    PageStats stats;
    if (fset.members.empty())
        return stats;
    std::uint64_t occupied = 0;
    std::uint64_t last_page = ~0ULL;
    for (const auto& a : fset.members) {
        const std::uint64_t page = std::uint64_t(a.bank) * geometry.rows_per_bank + a.row;
        if (page != last_page) {
            ++occupied;
            last_page = page;
        }
    }
    stats.avg_bits_per_occupied_page = double(fset.members.size()) / double(occupied);
    stats.occupied_page_fraction = double(occupied) / double(page_count(geometry));
    return stats;
}

// ---- enrollment database (text, one record per line, sorted) ----

inline void write_enrollment(const std::filesystem::path& path, const FilterSet& fset) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    char buf[128];
    out << "DLTE1\n";
    out << "geometry " << fset.geometry.banks << ' ' << fset.geometry.rows_per_bank << ' '
        << fset.geometry.cols_per_row << '\n';
    std::snprintf(buf, sizeof buf, "window %.6f %.6f\n", fset.window.lo, fset.window.hi);
    out << buf;
    out << "measurements " << fset.total_measurements << '\n';
    out << "campaign " << (fset.campaign_id.empty() ? "-" : fset.campaign_id) << '\n';
    out << "cells " << fset.members.size() << '\n';
    for (const auto& a : fset.members)
        out << a.bank << ',' << a.row << ',' << a.col << '\n';
    if (!out)
        throw IoError("short write: " + path.string());
}

inline FilterSet read_enrollment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line))
            throw IoError(std::string("enrollment file truncated before ") + what + ": " +
                          path.string());
        return line;
    };

    if (next_line("format tag") != "DLTE1")
        throw BadMagicError("not an enrollment database (expected DLTE1): " + path.string());

    FilterSet fset;
    {
        std::istringstream is(next_line("geometry"));
        std::string key;
        is >> key >> fset.geometry.banks >> fset.geometry.rows_per_bank >>
            fset.geometry.cols_per_row;
        if (key != "geometry" || !is)
            throw IoError("enrollment: malformed geometry line");
    }
    {
        std::istringstream is(next_line("window"));
        std::string key;
        is >> key >> fset.window.lo >> fset.window.hi;
        if (key != "window" || !is)
            throw IoError("enrollment: malformed window line");
    }
    {
        std::istringstream is(next_line("measurements"));
        std::string key;
        is >> key >> fset.total_measurements;
        if (key != "measurements" || !is)
            throw IoError("enrollment: malformed measurements line");
    }
    {
        std::istringstream is(next_line("campaign id"));
        std::string key;
        is >> key >> fset.campaign_id;
        if (key != "campaign" || !is)
            throw IoError("enrollment: malformed campaign line");
        if (fset.campaign_id == "-")
            fset.campaign_id.clear();
    }
    std::uint64_t expected = 0;
    {
        std::istringstream is(next_line("cell count"));
        std::string key;
        is >> key >> expected;
        if (key != "cells" || !is)
            throw IoError("enrollment: malformed cells line");
    }
    fset.geometry.validate();
    fset.window.validate();
    fset.members.reserve(expected);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        CellAddress a;
        const char* p = line.data();
        const char* end = p + line.size();
        auto parse_u32 = [&](std::uint32_t& v, char sep) {
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{} || (sep && (next == end || *next != sep)))
                throw IoError("enrollment: malformed record '" + line + "'");
            p = next + (sep ? 1 : 0);
        };
        parse_u32(a.bank, ',');
        parse_u32(a.row, ',');
        parse_u32(a.col, '\0');
        if (!a.in_range(fset.geometry))
            throw IoError("enrollment: record out of geometry range '" + line + "'");
        if (!fset.members.empty() && !(fset.members.back() < a))
            throw IoError("enrollment: records not in canonical sorted order");
        fset.members.push_back(a);
    }
    if (fset.members.size() != expected)
        throw IoError("enrollment: cell count mismatch (header " + std::to_string(expected) +
                      ", records " + std::to_string(fset.members.size()) + ")");
    return fset;
}

}  // namespace dltrng
