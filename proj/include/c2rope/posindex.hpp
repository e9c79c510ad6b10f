// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

// Positional indices for a multimodal sequence laid out as V views of
// rows x cols image tokens followed by text tokens.
//
// Each token gets a triplet (m, x, y): m is the 1-based position in the
// flattened sequence (raster order inside a view, running on across views and
// into the text), (x, y) are Cartesian coordinates with the origin at the
// center of the view, x growing rightward and y growing upward. Text tokens
// carry (m, m, m) so every rotary pair sees the same angle as plain RoPE.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace c2rope {

struct GridShape {
  std::int64_t rows = 1;
  std::int64_t cols = 1;

  std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
  void validate() const;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

struct MultiViewLayout {
  // views may be 0 for a text-only sequence
  std::int64_t views = 1;
  GridShape grid;
  std::int64_t text_len = 0;

  std::size_t image_count() const { return static_cast<std::size_t>(views) * grid.size(); }
  std::size_t total() const { return image_count() + static_cast<std::size_t>(text_len); }
  void validate() const;

  friend bool operator==(const MultiViewLayout&, const MultiViewLayout&) = default;
};

struct TripletIndex {
  std::int64_t m = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const TripletIndex&, const TripletIndex&) = default;
};

struct Coord {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

// Dense rows x cols grid, 0-based (row, col) addressing in raster order.
template <typename T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(GridShape shape, T fill = T{})
      : shape_(shape), cells_(shape.size(), fill) {}

  GridShape shape() const { return shape_; }
  T& at(std::int64_t row, std::int64_t col) { return cells_[index(row, col)]; }
  const T& at(std::int64_t row, std::int64_t col) const { return cells_[index(row, col)]; }
  const std::vector<T>& cells() const { return cells_; }
  std::vector<T>& cells() { return cells_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(std::int64_t row, std::int64_t col) const {
    return static_cast<std::size_t>(row * shape_.cols + col);
  }

  GridShape shape_;
  std::vector<T> cells_;
};

// Raster-scan positions: cell (i, j) (0-based) holds i * cols + j + 1.
Grid<std::int64_t> raster_index(GridShape grid);

// Centered coordinates. An even dimension has two central columns (rows)
// sharing coordinate 0; an odd one has a single central column (row).
Grid<Coord> cartesian_coords(GridShape grid);

// Column / row coordinate for a 0-based column / row.
std::int64_t column_coordinate(std::int64_t col, std::int64_t cols);
std::int64_t row_coordinate(std::int64_t row, std::int64_t rows);

// One triplet per token: image tokens view by view, then the text tokens.
std::vector<TripletIndex> triplet_indices(const MultiViewLayout& layout);

std::int64_t chebyshev_ring(std::int64_t x, std::int64_t y);

// Position of token `pos` (0-based) inside a layout.
struct TokenSlot {
  bool is_text = false;
  std::int64_t view = 0;  // 0-based, image tokens only
  std::int64_t row = 0;
  std::int64_t col = 0;
  std::int64_t text_ordinal = 0;  // 0-based, text tokens only
};
TokenSlot locate(const MultiViewLayout& layout, std::size_t pos);

}  // namespace c2rope
