// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/attention_mask.hpp"

namespace c2rope {

std::size_t AttentionMask::visible_count() const {
  std::size_t count = 0;
  for (auto v : visible_) {
    count += v;
  }
  return count;
}

std::size_t AttentionMask::row_count(std::size_t query) const {
  std::size_t count = 0;
  for (std::size_t k = 0; k < n_; ++k) {
    count += visible_[query * n_ + k];
  }
  return count;
}

bool AttentionMask::is_well_formed() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (!(*this)(i, i)) {
      return false;
    }
  }
  return true;
}

}  // namespace c2rope
