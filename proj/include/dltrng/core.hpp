#pragma once

// Shared domain types for the DRAM-latency TRNG pipeline: device geometry,
// cell addressing, operating conditions, measurement parameters and packed
// bitstreams. Everything here is an immutable value type.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dltrng {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters, malformed configs, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

// File-format and filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Bank/row/column layout of a simulated module. A row is one page; every
/// paper statistic is per-bank, so banks are the top-level unit.
struct DramGeometry {
    std::uint32_t banks = 1;
    std::uint32_t rows_per_bank = 1u << 14;   // pages per bank
    std::uint32_t cols_per_row = 1u << 16;    // bits per page (8 KiB default)

    void validate() const {
        if (banks < 1 || rows_per_bank < 1 || cols_per_row < 1)
            throw ValidationError("geometry: all counts must be >= 1");
        if (cols_per_row % 8 != 0)
            throw ValidationError("geometry: cols_per_row must be divisible by 8");
    }

    std::uint64_t page_bytes() const { return cols_per_row / 8; }
    bool operator==(const DramGeometry&) const = default;
};

inline std::uint64_t page_count(const DramGeometry& g) {
    return std::uint64_t(g.banks) * g.rows_per_bank;
}

inline std::uint64_t cell_count(const DramGeometry& g) {
    return page_count(g) * g.cols_per_row;
}

/// Location of a single cell. Ordering is (bank, row, col) lexicographic;
/// this is the canonical order used for enrollment files and harvesting.
struct CellAddress {
    std::uint32_t bank = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    auto operator<=>(const CellAddress&) const = default;

    bool in_range(const DramGeometry& g) const {
        return bank < g.banks && row < g.rows_per_bank && col < g.cols_per_row;
    }
};

/// Flat index of a cell in canonical order; unique within a geometry.
inline std::uint64_t cell_index(const DramGeometry& g, const CellAddress& a) {
    return (std::uint64_t(a.bank) * g.rows_per_bank + a.row) * g.cols_per_row + a.col;
}

/// Supply-voltage / temperature deltas relative to the nominal operating
/// point (1.5 V, 25 degC). Hard bounds reject conditions far outside what
/// a DDR3 module would survive.
struct OperatingCondition {
    double delta_v_mv = 0.0;
    double delta_t_c = 0.0;

    static constexpr double kMaxAbsDeltaVmV = 200.0;
    static constexpr double kMaxAbsDeltaTC = 60.0;

    void validate() const {
        if (!(delta_v_mv >= -kMaxAbsDeltaVmV && delta_v_mv <= kMaxAbsDeltaVmV))
            throw ValidationError("operating condition: |delta_v| exceeds 200 mV bound");
        if (!(delta_t_c >= -kMaxAbsDeltaTC && delta_t_c <= kMaxAbsDeltaTC))
            throw ValidationError("operating condition: |delta_t| exceeds 60 degC bound");
    }

    bool is_nominal() const { return delta_v_mv == 0.0 && delta_t_c == 0.0; }
    bool operator==(const OperatingCondition&) const = default;
};

/// One read-back of the device: written background pattern, precharge-latency
/// fraction, operating condition and the measurement ordinal that drives the
/// per-read randomness of noisy cells.
struct MeasurementSpec {
    std::uint8_t input_pattern = 0xFF;
    double t_rp_fraction = 0.19;   // ratio of the recommended t_RP
    OperatingCondition condition{};
    std::uint32_t measurement_index = 0;

    void validate() const {
        if (!(t_rp_fraction > 0.0 && t_rp_fraction <= 1.0))
            throw ValidationError("measurement spec: t_rp_fraction must be in (0, 1]");
        condition.validate();
    }

    /// Latency faults are active only below the full recommended t_RP.
    bool faults_active() const { return t_rp_fraction < 1.0; }
    bool operator==(const MeasurementSpec&) const = default;
};

/// Packed bit sequence, MSB-first within each byte; trailing pad bits zero.
class BitStream {
public:
    BitStream() = default;
    explicit BitStream(std::uint64_t length_bits)
        : length_(length_bits), bytes_((length_bits + 7) / 8, 0) {}

    static BitStream from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t length_bits) {
        if (bytes.size() != (length_bits + 7) / 8)
            throw ValidationError("bitstream: payload byte length must equal ceil(bits/8)");
        BitStream s;
        s.length_ = length_bits;
        s.bytes_ = std::move(bytes);
        s.clear_padding();
        return s;
    }

    std::uint64_t size() const { return length_; }
    bool empty() const { return length_ == 0; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    int bit(std::uint64_t i) const {
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
    }

    void set_bit(std::uint64_t i, int value) {
        const std::uint8_t mask = std::uint8_t(1u << (7 - (i & 7)));
        if (value)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= std::uint8_t(~mask);
    }

    void append_bit(int value) {
        if (length_ % 8 == 0)
            bytes_.push_back(0);
        ++length_;
        if (value)
            set_bit(length_ - 1, 1);
    }

    /// Bits [begin, begin+count) as a new stream.
    BitStream slice(std::uint64_t begin, std::uint64_t count) const {
        if (begin + count > length_)
            throw ValidationError("bitstream: slice out of range");
        BitStream out(count);
        for (std::uint64_t i = 0; i < count; ++i)
            out.set_bit(i, bit(begin + i));
        return out;
    }

    std::uint64_t count_ones() const {
        std::uint64_t n = 0;
        for (std::uint64_t i = 0; i < length_; ++i)
            n += std::uint64_t(bit(i));
        return n;
    }

    bool operator==(const BitStream&) const = default;

private:
    void clear_padding() {
        if (length_ % 8 != 0 && !bytes_.empty()) {
            const unsigned used = unsigned(length_ % 8);
            bytes_.back() &= std::uint8_t(0xFFu << (8 - used));
        }
    }

    std::uint64_t length_ = 0;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace dltrng
