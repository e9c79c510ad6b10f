// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace c2rope {

// Square query x key visibility matrix. Row = query position, column = key
// position, true = attendable.
class AttentionMask {
 public:
  AttentionMask() = default;
  explicit AttentionMask(std::size_t n) : n_(n), visible_(n * n, 0) {}

  std::size_t size() const { return n_; }

  bool operator()(std::size_t query, std::size_t key) const {
    return visible_[query * n_ + key] != 0;
  }
  void set(std::size_t query, std::size_t key, bool visible) {
    visible_[query * n_ + key] = visible ? 1 : 0;
  }

  std::size_t visible_count() const;
  std::size_t row_count(std::size_t query) const;

  // Every row has a visible entry and the diagonal is visible.
  bool is_well_formed() const;

  friend bool operator==(const AttentionMask&, const AttentionMask&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> visible_;
};

}  // namespace c2rope
