// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/maskgen.hpp"

#include <string>
#include <vector>

#include "c2rope/errors.hpp"

namespace c2rope {

std::string_view to_string(MaskKind kind) {
  return kind == MaskKind::causal ? "causal" : "chebyshev";
}

MaskKind parse_mask_kind(std::string_view label) {
  if (label == "causal") {
    return MaskKind::causal;
  }
  if (label == "chebyshev") {
    return MaskKind::chebyshev;
  }
  throw ConfigError("unknown mask kind '" + std::string(label) +
                    "' (expected causal or chebyshev)");
}

AttentionMask causal_mask(std::size_t n) {
  if (n == 0) {
    throw ConfigError("causal mask needs n >= 1");
  }
  AttentionMask mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      mask.set(i, j, true);
    }
  }
  return mask;
}

AttentionMask chebyshev_causal_mask(const MultiViewLayout& layout) {
  layout.validate();
  const std::size_t per_view = layout.grid.size();
  const std::size_t v = layout.image_count();
  const std::size_t n = layout.total();

  std::vector<std::int64_t> ring(per_view);
  const auto coords = cartesian_coords(layout.grid);
  for (std::size_t p = 0; p < per_view; ++p) {
    ring[p] = chebyshev_ring(coords.cells()[p].x, coords.cells()[p].y);
  }

  AttentionMask mask(n);
  for (std::size_t view = 0; view < static_cast<std::size_t>(layout.views); ++view) {
    const std::size_t begin = view * per_view;
    for (std::size_t qi = 0; qi < per_view; ++qi) {
      const std::size_t q = begin + qi;
      for (std::size_t k = 0; k < begin; ++k) {
        mask.set(q, k, true);
      }
      for (std::size_t ki = 0; ki < per_view; ++ki) {
        if (ring[ki] <= ring[qi]) {
          mask.set(q, begin + ki, true);
        }
      }
    }
  }
  for (std::size_t q = v; q < n; ++q) {
    for (std::size_t k = 0; k <= q; ++k) {
      mask.set(q, k, true);
    }
  }
  return mask;
}

AttentionMask build_mask(const MultiViewLayout& layout, MaskKind kind) {
  switch (kind) {
    case MaskKind::causal:
      layout.validate();
      return causal_mask(layout.total());
    case MaskKind::chebyshev:
      return chebyshev_causal_mask(layout);
  }
  throw ConfigError("unknown mask kind");
}

}  // namespace c2rope
