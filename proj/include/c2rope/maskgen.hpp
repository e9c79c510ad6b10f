// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "c2rope/attention_mask.hpp"
#include "c2rope/posindex.hpp"

namespace c2rope {

enum class MaskKind { causal, chebyshev };

std::string_view to_string(MaskKind kind);
// Throws ConfigError for an unknown label.
MaskKind parse_mask_kind(std::string_view label);

// visible(i, j) = j <= i
AttentionMask causal_mask(std::size_t n);

// Ring-ordered causality inside each view: an image query sees the image
// keys of its own view whose Chebyshev ring is not outside its own ring, plus
// every image token of earlier views. Image tokens never see text. A text
// query sees all image tokens and the text up to itself.
AttentionMask chebyshev_causal_mask(const MultiViewLayout& layout);

AttentionMask build_mask(const MultiViewLayout& layout, MaskKind kind);

}  // namespace c2rope
