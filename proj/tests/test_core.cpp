#include "dltrng/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace dltrng;

TEST(Geometry, CellCounts) {
    EXPECT_EQ(cell_count({1, 1u << 14, 1u << 16}), 1ull << 30);  // 1 Gbit bank
    EXPECT_EQ(cell_count({1, 1, 8}), 8u);
    EXPECT_EQ(cell_count({2, 1u << 14, 1u << 16}), 1ull << 31);
    EXPECT_EQ(page_count({4, 16, 64}), 64u);
}

TEST(Geometry, Validation) {
    EXPECT_NO_THROW((DramGeometry{1, 1, 8}.validate()));
    EXPECT_THROW((DramGeometry{0, 1, 8}.validate()), ValidationError);
    EXPECT_THROW((DramGeometry{1, 0, 8}.validate()), ValidationError);
    EXPECT_THROW((DramGeometry{1, 1, 12}.validate()), ValidationError);  // not byte-packable
}

TEST(BitStream, PackUnpackRoundTripsAllLengths) {
    std::mt19937_64 rng(7);
    for (std::uint64_t len = 0; len <= 4096; ++len) {
        BitStream s(len);
        for (std::uint64_t i = 0; i < len; ++i)
            s.set_bit(i, int(rng() & 1));
        ASSERT_EQ(s.bytes().size(), (len + 7) / 8);
        const BitStream back = BitStream::from_bytes(s.bytes(), len);
        ASSERT_EQ(back, s) << "length " << len;
        // trailing pad bits must be zero
        if (len % 8 != 0) {
            const unsigned used = unsigned(len % 8);
            ASSERT_EQ(s.bytes().back() & (0xFFu >> used), 0u) << "length " << len;
        }
    }
}

TEST(BitStream, AppendAndSlice) {
    BitStream s;
    for (int b : {1, 0, 1, 1, 0, 1, 0, 1, 0, 1})
        s.append_bit(b);
    EXPECT_EQ(s.size(), 10u);
    EXPECT_EQ(s.count_ones(), 6u);
    const BitStream mid = s.slice(2, 5);
    EXPECT_EQ(mid.size(), 5u);
    EXPECT_EQ(mid.bit(0), 1);
    EXPECT_EQ(mid.bit(1), 1);
    EXPECT_EQ(mid.bit(2), 0);
    EXPECT_THROW(s.slice(8, 3), ValidationError);
}

TEST(BitStream, FromBytesRejectsWrongLength) {
    EXPECT_THROW(BitStream::from_bytes({0xFF}, 9), ValidationError);
    EXPECT_THROW(BitStream::from_bytes({0xFF, 0x00}, 8), ValidationError);
}

TEST(CellAddress, CanonicalOrderIsStrictTotalOrder) {
    std::vector<CellAddress> cells = {
        {1, 0, 5}, {0, 9, 1}, {0, 0, 2}, {1, 0, 4}, {0, 9, 0}, {0, 0, 2},
    };
    std::sort(cells.begin(), cells.end());
    for (std::size_t i = 0; i + 1 < cells.size(); ++i)
        EXPECT_TRUE(cells[i] < cells[i + 1] || cells[i] == cells[i + 1]);
    EXPECT_EQ(cells.front(), (CellAddress{0, 0, 2}));
    EXPECT_EQ(cells.back(), (CellAddress{1, 0, 5}));
    // irreflexive and asymmetric
    EXPECT_FALSE(cells[0] < cells[0]);
    EXPECT_TRUE(cells[0] < cells[3]);
    EXPECT_FALSE(cells[3] < cells[0]);
}

TEST(CellAddress, FlatIndexMatchesCanonicalOrder) {
    const DramGeometry g{2, 4, 8};
    std::uint64_t expect = 0;
    for (std::uint32_t b = 0; b < g.banks; ++b)
        for (std::uint32_t r = 0; r < g.rows_per_bank; ++r)
            for (std::uint32_t c = 0; c < g.cols_per_row; ++c)
                EXPECT_EQ(cell_index(g, {b, r, c}), expect++);
}

TEST(OperatingCondition, Bounds) {
    EXPECT_NO_THROW((OperatingCondition{75.0, 0.0}.validate()));
    EXPECT_NO_THROW((OperatingCondition{-20.0, 20.0}.validate()));
    EXPECT_THROW((OperatingCondition{250.0, 0.0}.validate()), ValidationError);
    EXPECT_THROW((OperatingCondition{0.0, -70.0}.validate()), ValidationError);
}

TEST(MeasurementSpec, Validation) {
    MeasurementSpec spec;
    EXPECT_NO_THROW(spec.validate());
    EXPECT_TRUE(spec.faults_active());  // default 0.19
    spec.t_rp_fraction = 1.0;
    EXPECT_NO_THROW(spec.validate());
    EXPECT_FALSE(spec.faults_active());
    spec.t_rp_fraction = 0.0;
    EXPECT_THROW(spec.validate(), ValidationError);
    spec.t_rp_fraction = 1.5;
    EXPECT_THROW(spec.validate(), ValidationError);
}
