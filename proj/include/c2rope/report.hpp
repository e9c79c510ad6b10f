// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

// Text and image serialisation for indices, allocations, masks, decay
// series and flow maps, plus atomic file output.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c2rope/analysis.hpp"
#include "c2rope/attention_mask.hpp"
#include "c2rope/numkit.hpp"
#include "c2rope/posindex.hpp"
#include "c2rope/rotary.hpp"

namespace c2rope {

// Leading comment line carried by every analysis output.
struct Provenance {
  std::uint64_t seed = 0;
  std::string variant;
  std::string normalization;

  std::string comment() const;  // "# seed=.. variant=.. normalization=.."
};

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// view,row,col,m,x,y. Image rows use 1-based view/row/col; text rows use
// view=0, row=0, col=<1-based text ordinal>.
std::string indices_csv(const MultiViewLayout& layout);
std::string allocation_csv(const FrequencyAllocation& alloc);
std::string mask_csv(const AttentionMask& mask);
std::string mask_pgm(const AttentionMask& mask);

std::string decay_csv(std::span<const DecaySeries> series, const Provenance& prov);
std::string flow_map_csv(const FlowMap& map, const Provenance& prov);
std::string matrix_csv(const Matrix& m);

// 8-bit binary PGM, min-max scaled. Views are stacked vertically.
std::string flow_map_pgm(const FlowMap& map, const Provenance& prov);
// Standalone SVG heatmap with a colour legend. Views side by side.
std::string flow_map_svg(const FlowMap& map, const Provenance& prov, std::string_view title);

std::string flow_series_csv(std::span<const PositionFlow> series, const Provenance& prov);
// Inverse of flow_series_csv; comment lines and the header are skipped.
std::vector<PositionFlow> parse_flow_series(std::string_view text);

// Writes via a sibling temp file and rename, so readers never see a partial
// file. Creates missing parent directories.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace c2rope
