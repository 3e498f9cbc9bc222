#pragma once

// Bit harvesting and hash conditioning. Harvest reads the enrolled cells
// in canonical address order, advancing the measurement index once every
// member has contributed a bit; conditioning hashes consecutive
// non-overlapping blocks and concatenates the digests. A trailing partial
// block is discarded rather than padded.

#include <cstdint>
#include <string>
#include <vector>

#include "dltrng/core.hpp"
#include "dltrng/filter.hpp"
#include "dltrng/measurement.hpp"
#include "dltrng/sha2.hpp"

namespace dltrng {

enum class HashAlgorithm {
    Sha256,
    Sha512,
};

struct ConditionerConfig {
    HashAlgorithm algorithm = HashAlgorithm::Sha256;

    std::uint32_t block_bits() const {
        return algorithm == HashAlgorithm::Sha256 ? 512 : 1024;
    }
    std::uint32_t digest_bits() const {
        return algorithm == HashAlgorithm::Sha256 ? 256 : 512;
    }
    std::string name() const {
        return algorithm == HashAlgorithm::Sha256 ? "sha256" : "sha512";
    }

    static ConditionerConfig from_name(const std::string& name) {
        if (name == "sha256")
            return {HashAlgorithm::Sha256};
        if (name == "sha512")
            return {HashAlgorithm::Sha512};
        throw ValidationError("unknown conditioner: " + name + " (expected sha256 or sha512)");
    }
};

/// Raw bits from the enrolled cells: members in canonical order, one full
/// pass per measurement index, starting at spec.measurement_index.
inline BitStream harvest(MeasurementSource& source, const FilterSet& fset,
                         const MeasurementSpec& spec, std::uint64_t n_raw_bits) {
    if (fset.empty())
        throw ValidationError("harvest: empty filter set");
    if (n_raw_bits < 1)
        throw ValidationError("harvest: need at least one bit");
    if (!(source.geometry() == fset.geometry))
        throw GeometryMismatchError("harvest: source geometry does not match enrollment");
    spec.validate();

    // Group member columns by page once; members are sorted, so runs are
    // contiguous.
    struct PageGroup {
        std::uint32_t bank, row;
        std::vector<std::uint32_t> cols;
    };
    std::vector<PageGroup> groups;
    for (const auto& a : fset.members) {
        if (groups.empty() || groups.back().bank != a.bank || groups.back().row != a.row)
            groups.push_back({a.bank, a.row, {}});
        groups.back().cols.push_back(a.col);
    }

    BitStream out(n_raw_bits);
    std::uint64_t written = 0;
    MeasurementSpec round_spec = spec;
    for (std::uint64_t round = 0; written < n_raw_bits; ++round) {
        round_spec.measurement_index = spec.measurement_index + std::uint32_t(round);
        for (const auto& g : groups) {
            const std::uint64_t want =
                std::min<std::uint64_t>(g.cols.size(), n_raw_bits - written);
            const BitStream bits = source.read_cells(
                round_spec, g.bank, g.row,
                std::span<const std::uint32_t>(g.cols.data(), want));
            for (std::uint64_t i = 0; i < want; ++i)
                out.set_bit(written++, bits.bit(i));
            if (written == n_raw_bits)
                break;
        }
    }
    return out;
}

/// Hash conditioning: digests of consecutive block_bits-sized blocks,
/// concatenated. Output length = floor(len / block_bits) * digest_bits.
inline BitStream condition(const BitStream& raw, const ConditionerConfig& cfg) {
    const std::uint64_t block_bits = cfg.block_bits();
    if (raw.size() < block_bits)
        throw ValidationError("condition: input shorter than one hash block (" +
                              std::to_string(raw.size()) + " < " + std::to_string(block_bits) +
                              " bits)");
    const std::uint64_t blocks = raw.size() / block_bits;
    const std::uint64_t block_bytes = block_bits / 8;
    const std::uint64_t digest_bits = cfg.digest_bits();

    std::vector<std::uint8_t> out_bytes;
    out_bytes.reserve(blocks * digest_bits / 8);
    for (std::uint64_t b = 0; b < blocks; ++b) {
        const std::uint8_t* block = raw.bytes().data() + b * block_bytes;
        if (cfg.algorithm == HashAlgorithm::Sha256) {
            const auto d = Sha256::digest(block, block_bytes);
            out_bytes.insert(out_bytes.end(), d.begin(), d.end());
        } else {
            const auto d = Sha512::digest(block, block_bytes);
            out_bytes.insert(out_bytes.end(), d.begin(), d.end());
        }
    }
    return BitStream::from_bytes(std::move(out_bytes), blocks * digest_bits);
}

/// Full generation path: harvest exactly enough raw blocks, condition, trim.
inline BitStream generate(MeasurementSource& source, const FilterSet& fset,
                          const ConditionerConfig& cfg, std::uint64_t n_out_bits,
                          const MeasurementSpec& spec) {
    if (n_out_bits < 1)
        throw ValidationError("generate: need at least one output bit");
    const std::uint64_t digest_bits = cfg.digest_bits();
    const std::uint64_t blocks = (n_out_bits + digest_bits - 1) / digest_bits;
    const BitStream raw = harvest(source, fset, spec, blocks * cfg.block_bits());
    const BitStream conditioned = condition(raw, cfg);
    if (conditioned.size() == n_out_bits)
        return conditioned;
    return conditioned.slice(0, n_out_bits);
}

/// Inputs of the steady-state throughput model; enrollment effort is
/// excluded (it happens once per module lifetime).
struct ThroughputParams {
    double digest_bits = 256;
    double block_bits = 512;
    double avg_random_bits_per_page = 84.7;
    double page_read_time_s = 91.2e-6;
    double hash_cycles_per_byte = 3.78;
    double clock_hz = 2.2e9;

    void validate() const {
        for (double v : {digest_bits, block_bits, avg_random_bits_per_page, page_read_time_s,
                         hash_cycles_per_byte, clock_hz})
            if (!(v > 0.0))
                throw ValidationError("throughput: all parameters must be strictly positive");
    }
};

struct ThroughputBreakdown {
    double t_data_s = 0.0;
    double t_hash_s = 0.0;
    double bits_per_second = 0.0;
};

/// T = D_l / (t_data,B_l + t_hash), with t_data averaged over fractional
/// pages and t_hash from the per-byte hashing rate.
inline ThroughputBreakdown throughput(const ThroughputParams& p) {
    p.validate();
    ThroughputBreakdown out;
    out.t_hash_s = (p.block_bits / 8.0) * p.hash_cycles_per_byte / p.clock_hz;
    out.t_data_s = (p.block_bits / p.avg_random_bits_per_page) * p.page_read_time_s;
    out.bits_per_second = p.digest_bits / (out.t_data_s + out.t_hash_s);
    return out;
}

}  // namespace dltrng
