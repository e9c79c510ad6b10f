// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <vector>

#include "c2rope/errors.hpp"
#include "c2rope/posindex.hpp"

namespace c2rope {
namespace {

TEST(RasterIndex, FourByFourExamples) {
  const auto m = raster_index({4, 4});
  EXPECT_EQ(m.at(1, 0), 5);
  EXPECT_EQ(m.at(3, 3), 16);
  EXPECT_EQ(m.at(0, 0), 1);
}

TEST(RasterIndex, SingleCell) { EXPECT_EQ(raster_index({1, 1}).at(0, 0), 1); }

TEST(RasterIndex, RejectsEmptyGrid) {
  EXPECT_THROW(raster_index({0, 3}), ConfigError);
  EXPECT_THROW(raster_index({2, -1}), ConfigError);
}

TEST(CartesianCoords, FourByFourCorners) {
  const auto c = cartesian_coords({4, 4});
  EXPECT_EQ(c.at(0, 0), (Coord{-1, 1}));
  EXPECT_EQ(c.at(3, 3), (Coord{1, -1}));
  EXPECT_EQ(c.at(0, 3), (Coord{1, 1}));
  EXPECT_EQ(c.at(3, 0), (Coord{-1, -1}));
}

TEST(CartesianCoords, FourByFourHasExactlyTheCentralOrigins) {
  const auto c = cartesian_coords({4, 4});
  std::vector<std::pair<int, int>> origins;
  for (int r = 0; r < 4; ++r) {
    for (int col = 0; col < 4; ++col) {
      if (c.at(r, col) == Coord{0, 0}) {
        origins.emplace_back(r, col);
      }
    }
  }
  const std::vector<std::pair<int, int>> expected{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  EXPECT_EQ(origins, expected);
}

TEST(CartesianCoords, OddGridHasSingleCentre) {
  const auto c = cartesian_coords({3, 5});
  EXPECT_EQ(c.at(1, 2), (Coord{0, 0}));
  EXPECT_EQ(c.at(0, 0), (Coord{-2, 1}));
  EXPECT_EQ(c.at(2, 4), (Coord{2, -1}));
  EXPECT_EQ(std::count(c.cells().begin(), c.cells().end(), Coord{0, 0}), 1);
}

TEST(CartesianCoords, XGrowsRightwardYGrowsUpward) {
  for (std::int64_t n = 1; n <= 9; ++n) {
    for (std::int64_t k = 0; k + 1 < n; ++k) {
      EXPECT_GE(column_coordinate(k + 1, n), column_coordinate(k, n));
      EXPECT_LE(row_coordinate(k + 1, n), row_coordinate(k, n));
    }
  }
}

TEST(TripletIndices, SingleViewCorners) {
  const auto t = triplet_indices({1, {4, 4}, 0});
  ASSERT_EQ(t.size(), 16u);
  EXPECT_EQ(t.front(), (TripletIndex{1, -1, 1}));
  EXPECT_EQ(t.back(), (TripletIndex{16, 1, -1}));
}

TEST(TripletIndices, CentralEntries) {
  const auto t = triplet_indices({1, {4, 4}, 0});
  EXPECT_EQ(t[5], (TripletIndex{6, 0, 0}));
  EXPECT_EQ(t[6], (TripletIndex{7, 0, 0}));
  EXPECT_EQ(t[9], (TripletIndex{10, 0, 0}));
  EXPECT_EQ(t[10], (TripletIndex{11, 0, 0}));
}

TEST(TripletIndices, TextTokensRepeatM) {
  const auto t = triplet_indices({1, {4, 4}, 2});
  ASSERT_EQ(t.size(), 18u);
  EXPECT_EQ(t[16], (TripletIndex{17, 17, 17}));
  EXPECT_EQ(t[17], (TripletIndex{18, 18, 18}));
}

TEST(TripletIndices, MContinuesAcrossViews) {
  const auto t = triplet_indices({2, {2, 2}, 0});
  ASSERT_EQ(t.size(), 8u);
  EXPECT_EQ(t[4], (TripletIndex{5, 0, 0}));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(t[k].x, t[k + 4].x);
    EXPECT_EQ(t[k].y, t[k + 4].y);
    EXPECT_EQ(t[k + 4].m, t[k].m + 4);
  }
}

TEST(TripletIndices, TextOnlyLayout) {
  const auto t = triplet_indices({0, {4, 4}, 3});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], (TripletIndex{1, 1, 1}));
  EXPECT_EQ(t[2], (TripletIndex{3, 3, 3}));
}

TEST(TripletIndices, RejectsEmptyLayout) {
  EXPECT_THROW(triplet_indices({0, {4, 4}, 0}), ConfigError);
  EXPECT_THROW(triplet_indices({-1, {4, 4}, 2}), ConfigError);
}

TEST(ChebyshevRing, Examples) {
  EXPECT_EQ(chebyshev_ring(0, 0), 0);
  EXPECT_EQ(chebyshev_ring(-1, 1), 1);
  EXPECT_EQ(chebyshev_ring(3, -5), 5);
}

TEST(ChebyshevRing, FourByFourRingSizes) {
  std::map<std::int64_t, int> counts;
  const auto coords = cartesian_coords({4, 4});
  for (const Coord& c : coords.cells()) {
    ++counts[chebyshev_ring(c.x, c.y)];
  }
  EXPECT_EQ(counts[0], 4);
  EXPECT_EQ(counts[1], 12);
  EXPECT_EQ(counts.size(), 2u);
}

// Vertical neighbours: x identical, |y| moves by one, except across the two
// central rows of an even-height grid where both rows sit at y = 0.
TEST(PosindexProperty, VerticalNeighbours) {
  for (std::int64_t rows = 1; rows <= 9; ++rows) {
    for (std::int64_t cols = 1; cols <= 9; ++cols) {
      const auto c = cartesian_coords({rows, cols});
      const auto m = raster_index({rows, cols});
      for (std::int64_t r = 0; r + 1 < rows; ++r) {
        const bool seam = rows % 2 == 0 && r + 1 == rows / 2;
        for (std::int64_t col = 0; col < cols; ++col) {
          const Coord a = c.at(r, col);
          const Coord b = c.at(r + 1, col);
          EXPECT_EQ(a.x, b.x);
          EXPECT_EQ(a.y - b.y, seam ? 0 : 1) << rows << "x" << cols << " row " << r;
          EXPECT_EQ(m.at(r + 1, col) - m.at(r, col), cols);
        }
      }
    }
  }
}

TEST(PosindexProperty, RasterOrderMatchesTriplets) {
  for (std::int64_t rows = 1; rows <= 7; ++rows) {
    for (std::int64_t cols = 1; cols <= 7; ++cols) {
      const GridShape g{rows, cols};
      const auto t = triplet_indices({1, g, 0});
      const auto m = raster_index(g);
      const auto c = cartesian_coords(g);
      for (std::size_t p = 0; p < t.size(); ++p) {
        const auto slot = locate({1, g, 0}, p);
        EXPECT_EQ(t[p].m, m.at(slot.row, slot.col));
        EXPECT_EQ(t[p].m, slot.row * cols + slot.col + 1);
        EXPECT_EQ((Coord{t[p].x, t[p].y}), c.at(slot.row, slot.col));
      }
    }
  }
}

TEST(PosindexProperty, EvenAxesAreMirrorSymmetric) {
  for (std::int64_t n = 2; n <= 12; n += 2) {
    std::vector<std::int64_t> xs;
    std::vector<std::int64_t> neg;
    for (std::int64_t k = 0; k < n; ++k) {
      xs.push_back(column_coordinate(k, n));
      neg.push_back(-row_coordinate(k, n));
    }
    auto flipped = xs;
    for (auto& v : flipped) {
      v = -v;
    }
    std::sort(xs.begin(), xs.end());
    std::sort(flipped.begin(), flipped.end());
    std::sort(neg.begin(), neg.end());
    EXPECT_EQ(xs, flipped);
    EXPECT_EQ(xs, neg);
  }
}

TEST(PosindexProperty, RingsPartitionTheGrid) {
  for (std::int64_t rows = 1; rows <= 8; ++rows) {
    for (std::int64_t cols = 1; cols <= 8; ++cols) {
      std::map<std::int64_t, std::size_t> counts;
      const auto coords = cartesian_coords({rows, cols});
      for (const Coord& c : coords.cells()) {
        ++counts[chebyshev_ring(c.x, c.y)];
      }
      std::size_t total = 0;
      for (const auto& [ring, n] : counts) {
        total += n;
      }
      EXPECT_EQ(total, static_cast<std::size_t>(rows * cols));
    }
  }
}

TEST(Locate, ImageAndTextSlots) {
  const MultiViewLayout layout{2, {3, 4}, 2};
  const auto s = locate(layout, 17);
  EXPECT_FALSE(s.is_text);
  EXPECT_EQ(s.view, 1);
  EXPECT_EQ(s.row, 1);
  EXPECT_EQ(s.col, 1);
  const auto t = locate(layout, 25);
  EXPECT_TRUE(t.is_text);
  EXPECT_EQ(t.text_ordinal, 1);
  EXPECT_THROW(locate(layout, 26), ShapeError);
}

}  // namespace
}  // namespace c2rope
