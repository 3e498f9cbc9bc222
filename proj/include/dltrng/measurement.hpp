#pragma once

// Measurement acquisition and the DLT1 dump format. A dump is one full
// read-back of the module under a single MeasurementSpec; campaigns are
// ordered lists of dumps. The same pipeline runs against the simulator or
// against dumps imported from real hardware, through MeasurementSource.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dltrng/core.hpp"
#include "dltrng/sim.hpp"

namespace dltrng {

inline std::string hex_byte(std::uint8_t b) {
    static constexpr char kHex[] = "0123456789abcdef";
    return std::string{kHex[b >> 4], kHex[b & 0xF]};
}

class BadMagicError : public IoError {
public:
    using IoError::IoError;
};
class VersionMismatchError : public IoError {
public:
    using IoError::IoError;
};
class TruncatedPayloadError : public IoError {
public:
    using IoError::IoError;
};
class GeometryMismatchError : public IoError {
public:
    using IoError::IoError;
};

struct MeasurementDump {
    static constexpr std::uint16_t kFormatVersion = 1;

    DramGeometry geometry{};
    MeasurementSpec spec{};
    std::uint64_t seed = 0;  // zero for imported hardware dumps
    std::string vendor;
    std::vector<std::uint8_t> payload;  // bank-major, row-major, MSB-first pages

    std::uint64_t expected_payload_bytes() const {
        return page_count(geometry) * geometry.page_bytes();
    }

    std::uint64_t page_offset(std::uint32_t bank, std::uint32_t row) const {
        return (std::uint64_t(bank) * geometry.rows_per_bank + row) * geometry.page_bytes();
    }

    int bit(std::uint32_t bank, std::uint32_t row, std::uint32_t col) const {
        const std::uint8_t byte = payload[page_offset(bank, row) + col / 8];
        return (byte >> (7 - (col & 7))) & 1;
    }

    BitStream page(std::uint32_t bank, std::uint32_t row) const {
        const std::uint64_t off = page_offset(bank, row);
        std::vector<std::uint8_t> bytes(payload.begin() + long(off),
                                        payload.begin() + long(off + geometry.page_bytes()));
        return BitStream::from_bytes(std::move(bytes), geometry.cols_per_row);
    }
};

namespace dump_detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(std::uint8_t(v >> (8 * i)));
}
inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(std::uint8_t(v >> (8 * i)));
}

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() {
        const auto* p = take(2);
        return std::uint16_t(p[0] | (p[1] << 8));
    }
    std::uint32_t u32() {
        const auto* p = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i)
            v = (v << 8) | p[i];
        return v;
    }
    std::uint64_t u64() {
        const auto* p = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | p[i];
        return v;
    }
    std::size_t remaining() const { return size_ - pos_; }
    const std::uint8_t* take(std::size_t n) {
        if (pos_ + n > size_)
            throw TruncatedPayloadError("dump truncated inside header");
        const std::uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace dump_detail

/// Serializes a dump to the DLT1 wire format (all fields little-endian).
inline std::vector<std::uint8_t> encode_dump(const MeasurementDump& dump) {
    using namespace dump_detail;
    dump.geometry.validate();
    if (dump.payload.size() != dump.expected_payload_bytes())
        throw GeometryMismatchError("dump payload length does not match geometry");
    if (dump.vendor.size() > 255)
        throw ValidationError("vendor label longer than 255 bytes");
    if (dump.geometry.banks > 255)
        throw ValidationError("DLT1 stores at most 255 banks");
    if (dump.spec.measurement_index > 0xFFFF)
        throw ValidationError("DLT1 stores at most 16-bit measurement indices");

    std::vector<std::uint8_t> out;
    out.reserve(40 + dump.vendor.size() + dump.payload.size());
    out.insert(out.end(), {'D', 'L', 'T', '1'});
    put_u16(out, MeasurementDump::kFormatVersion);
    out.push_back(std::uint8_t(dump.geometry.banks));
    put_u32(out, dump.geometry.rows_per_bank);
    put_u32(out, dump.geometry.cols_per_row);
    out.push_back(dump.spec.input_pattern);
    put_u16(out, std::uint16_t(std::lround(dump.spec.t_rp_fraction * 1000.0)));
    put_u16(out, std::uint16_t(std::int16_t(std::lround(dump.spec.condition.delta_v_mv))));
    put_u16(out, std::uint16_t(std::int16_t(std::lround(dump.spec.condition.delta_t_c))));
    put_u16(out, std::uint16_t(dump.spec.measurement_index));
    put_u64(out, dump.seed);
    out.push_back(std::uint8_t(dump.vendor.size()));
    out.insert(out.end(), dump.vendor.begin(), dump.vendor.end());
    out.insert(out.end(), dump.payload.begin(), dump.payload.end());
    return out;
}

inline MeasurementDump decode_dump(const std::uint8_t* data, std::size_t size) {
    dump_detail::Reader r(data, size);
    const auto* magic = r.take(4);
    if (!(magic[0] == 'D' && magic[1] == 'L' && magic[2] == 'T' && magic[3] == '1'))
        throw BadMagicError("not a DLT1 dump (bad magic)");
    const std::uint16_t version = r.u16();
    if (version != MeasurementDump::kFormatVersion)
        throw VersionMismatchError("unsupported DLT1 version " + std::to_string(version));

    MeasurementDump dump;
    dump.geometry.banks = r.u8();
    dump.geometry.rows_per_bank = r.u32();
    dump.geometry.cols_per_row = r.u32();
    dump.spec.input_pattern = r.u8();
    dump.spec.t_rp_fraction = r.u16() / 1000.0;
    dump.spec.condition.delta_v_mv = double(std::int16_t(r.u16()));
    dump.spec.condition.delta_t_c = double(std::int16_t(r.u16()));
    dump.spec.measurement_index = r.u16();
    dump.seed = r.u64();
    const std::uint8_t vlen = r.u8();
    const auto* vp = r.take(vlen);
    dump.vendor.assign(reinterpret_cast<const char*>(vp), vlen);

    try {
        dump.geometry.validate();
    } catch (const ValidationError& e) {
        throw GeometryMismatchError(std::string("dump header geometry invalid: ") + e.what());
    }
    const std::uint64_t expected = dump.expected_payload_bytes();
    if (r.remaining() < expected)
        throw TruncatedPayloadError("dump payload truncated: expected " +
                                    std::to_string(expected) + " bytes, found " +
                                    std::to_string(r.remaining()));
    if (r.remaining() > expected)
        throw GeometryMismatchError("dump payload longer than geometry allows: expected " +
                                    std::to_string(expected) + " bytes, found " +
                                    std::to_string(r.remaining()));
    const auto* p = r.take(expected);
    dump.payload.assign(p, p + expected);
    return dump;
}

inline void write_dump(const std::filesystem::path& path, const MeasurementDump& dump) {
    const auto bytes = encode_dump(dump);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), long(bytes.size()));
    if (!out)
        throw IoError("short write: " + path.string());
}

inline MeasurementDump read_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_dump(bytes.data(), bytes.size());
}

/// Acquisition abstraction over either the simulator or frozen dumps.
/// Repeated acquire with an identical (spec, bank, row) returns identical
/// bits.
class MeasurementSource {
public:
    virtual ~MeasurementSource() = default;

    virtual DramGeometry geometry() const = 0;
    virtual BitStream acquire(const MeasurementSpec& spec, std::uint32_t bank,
                              std::uint32_t row) = 0;

    /// Reads only the given columns of one page, in the given order.
    /// Bit-identical to extracting from acquire(); sources with a cheap
    /// per-cell path override this.
    virtual BitStream read_cells(const MeasurementSpec& spec, std::uint32_t bank,
                                 std::uint32_t row, std::span<const std::uint32_t> cols) {
        const BitStream page = acquire(spec, bank, row);
        BitStream out(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i)
            out.set_bit(i, page.bit(cols[i]));
        return out;
    }

    virtual std::uint64_t seed_or_zero() const { return 0; }
    virtual std::string vendor_label() const { return ""; }
};

class SimulatorSource final : public MeasurementSource {
public:
    SimulatorSource(SimulatedDevice device, std::string vendor_label = "sim")
        : device_(std::move(device)), vendor_(std::move(vendor_label)) {}

    DramGeometry geometry() const override { return device_.geometry(); }

    BitStream acquire(const MeasurementSpec& spec, std::uint32_t bank,
                      std::uint32_t row) override {
        device_.write_pattern(spec.input_pattern);
        return device_.read_page(bank, row, spec);
    }

    BitStream read_cells(const MeasurementSpec& spec, std::uint32_t bank, std::uint32_t row,
                         std::span<const std::uint32_t> cols) override {
        device_.write_pattern(spec.input_pattern);
        BitStream out(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i)
            out.set_bit(i, device_.read_cell({bank, row, cols[i]}, spec));
        return out;
    }

    std::uint64_t seed_or_zero() const override { return device_.seed(); }
    std::string vendor_label() const override { return vendor_; }

    const SimulatedDevice& device() const { return device_; }

private:
    SimulatedDevice device_;
    std::string vendor_;
};

/// Serves previously captured dumps; acquire matches on the full spec.
class DumpSource final : public MeasurementSource {
public:
    explicit DumpSource(std::vector<MeasurementDump> dumps) : dumps_(std::move(dumps)) {
        if (dumps_.empty())
            throw ValidationError("dump source needs at least one dump");
        for (const auto& d : dumps_)
            if (!(d.geometry == dumps_.front().geometry))
                throw GeometryMismatchError("dump source: geometry mismatch among dumps");
    }

    DramGeometry geometry() const override { return dumps_.front().geometry; }

    BitStream acquire(const MeasurementSpec& spec, std::uint32_t bank,
                      std::uint32_t row) override {
        for (const auto& d : dumps_)
            if (d.spec == spec)
                return d.page(bank, row);
        throw IoError("dump source: no dump matches the requested spec");
    }

    std::string vendor_label() const override { return dumps_.front().vendor; }

private:
    std::vector<MeasurementDump> dumps_;
};

/// Runs the measurement protocol: for each pattern, `repeats` acquisitions
/// of the whole module, measurement_index increasing across the campaign
/// (pattern-major). 4 patterns x 5 repeats is the canonical 20-set campaign.
inline std::vector<MeasurementDump> capture_campaign(MeasurementSource& source,
                                                     std::span<const std::uint8_t> patterns,
                                                     unsigned repeats_per_pattern,
                                                     const MeasurementSpec& spec_template) {
    if (patterns.empty())
        throw ValidationError("campaign needs at least one pattern");
    if (repeats_per_pattern < 1)
        throw ValidationError("campaign needs repeats >= 1");
    spec_template.validate();

    const DramGeometry geom = source.geometry();
    std::vector<MeasurementDump> dumps;
    dumps.reserve(patterns.size() * repeats_per_pattern);
    std::uint32_t index = spec_template.measurement_index;
    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        for (unsigned r = 0; r < repeats_per_pattern; ++r, ++index) {
            MeasurementSpec spec = spec_template;
            spec.input_pattern = patterns[pi];
            spec.measurement_index = index;

            MeasurementDump dump;
            dump.geometry = geom;
            dump.spec = spec;
            dump.seed = source.seed_or_zero();
            dump.vendor = source.vendor_label();
            dump.payload.reserve(dump.expected_payload_bytes());
            for (std::uint32_t b = 0; b < geom.banks; ++b) {
                for (std::uint32_t row = 0; row < geom.rows_per_bank; ++row) {
                    BitStream page;
                    try {
                        page = source.acquire(spec, b, row);
                    } catch (const Error& e) {
                        throw IoError("campaign acquisition failed at pattern 0x" +
                                      hex_byte(patterns[pi]) + " repeat " + std::to_string(r) +
                                      ": " + e.what());
                    }
                    dump.payload.insert(dump.payload.end(), page.bytes().begin(),
                                        page.bytes().end());
                }
            }
            dumps.push_back(std::move(dump));
        }
    }
    return dumps;
}

}  // namespace dltrng
