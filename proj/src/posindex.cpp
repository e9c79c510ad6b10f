// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/posindex.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "c2rope/errors.hpp"

namespace c2rope {

void GridShape::validate() const {
  if (rows < 1 || cols < 1) {
    throw ConfigError("grid must be at least 1x1, got " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
}

void MultiViewLayout::validate() const {
  grid.validate();
  if (views < 0) {
    throw ConfigError("views must be non-negative");
  }
  if (text_len < 0) {
    throw ConfigError("text length must be non-negative");
  }
  if (total() == 0) {
    throw ConfigError("layout has no tokens");
  }
}

Grid<std::int64_t> raster_index(GridShape grid) {
  grid.validate();
  Grid<std::int64_t> out(grid);
  for (std::int64_t i = 0; i < grid.rows; ++i) {
    for (std::int64_t j = 0; j < grid.cols; ++j) {
      out.at(i, j) = i * grid.cols + j + 1;
    }
  }
  return out;
}

std::int64_t column_coordinate(std::int64_t col, std::int64_t cols) {
  const std::int64_t j = col + 1;
  if (cols % 2 == 1) {
    return j - (cols + 1) / 2;
  }
  const std::int64_t half = cols / 2;
  return j <= half ? j - half : j - half - 1;
}

std::int64_t row_coordinate(std::int64_t row, std::int64_t rows) {
  const std::int64_t i = row + 1;
  if (rows % 2 == 1) {
    return (rows + 1) / 2 - i;
  }
  const std::int64_t half = rows / 2;
  return i <= half ? half - i : half - i + 1;
}

Grid<Coord> cartesian_coords(GridShape grid) {
  grid.validate();
  Grid<Coord> out(grid);
  for (std::int64_t i = 0; i < grid.rows; ++i) {
    for (std::int64_t j = 0; j < grid.cols; ++j) {
      out.at(i, j) = Coord{column_coordinate(j, grid.cols), row_coordinate(i, grid.rows)};
    }
  }
  return out;
}

std::vector<TripletIndex> triplet_indices(const MultiViewLayout& layout) {
  layout.validate();
  const auto coords = cartesian_coords(layout.grid);
  std::vector<TripletIndex> out;
  out.reserve(layout.total());
  std::int64_t m = 1;
  for (std::int64_t view = 0; view < layout.views; ++view) {
    for (const Coord& c : coords.cells()) {
      out.push_back({m++, c.x, c.y});
    }
  }
  for (std::int64_t t = 0; t < layout.text_len; ++t, ++m) {
    out.push_back({m, m, m});
  }
  return out;
}

std::int64_t chebyshev_ring(std::int64_t x, std::int64_t y) {
  return std::max(std::abs(x), std::abs(y));
}

TokenSlot locate(const MultiViewLayout& layout, std::size_t pos) {
  if (pos >= layout.total()) {
    throw ShapeError("token position " + std::to_string(pos) + " outside layout");
  }
  TokenSlot slot;
  if (pos >= layout.image_count()) {
    slot.is_text = true;
    slot.text_ordinal = static_cast<std::int64_t>(pos - layout.image_count());
    return slot;
  }
  const auto per_view = static_cast<std::int64_t>(layout.grid.size());
  const auto p = static_cast<std::int64_t>(pos);
  slot.view = p / per_view;
  slot.row = (p % per_view) / layout.grid.cols;
  slot.col = (p % per_view) % layout.grid.cols;
  return slot;
}

}  // namespace c2rope
