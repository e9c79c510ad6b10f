// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

// Diagnostics over rotary encodings and attention traces: Monte-Carlo decay
// curves, spatial decay maps, and attention-mass "information flow" from
// image tokens to instruction and generated tokens.
//
// Information flow is raw post-softmax attention mass averaged over layers,
// heads and the relevant query rows. It is not a gradient saliency.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c2rope/posindex.hpp"
#include "c2rope/rotary.hpp"
#include "c2rope/toynet.hpp"

namespace c2rope {

// How Monte-Carlo query/key pairs are drawn. `matched` uses k = q (a query
// meeting a content-identical key); `independent` draws k separately, in
// which case E|score| does not depend on the offset at all.
enum class PairModel { matched, independent };

std::string_view to_string(PairModel model);
PairModel parse_pair_model(std::string_view label);

struct DecayBin {
  std::int64_t delta = 0;
  double mean_abs_score = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;

  friend bool operator==(const DecayBin&, const DecayBin&) = default;
};

struct DecaySeries {
  Variant variant = Variant::vanilla;
  Component sweep = Component::m;
  PairModel pairs = PairModel::matched;
  std::uint64_t seed = 0;
  std::vector<DecayBin> bins;

  friend bool operator==(const DecaySeries&, const DecaySeries&) = default;
};

struct DecayOptions {
  Component sweep = Component::m;
  PairModel pairs = PairModel::matched;
  bool include_zero = true;  // prepend the delta = 0 reference bin
};

// Samples are split into fixed-size shards, each with its own RNG stream
// (seed, shard), evaluated in parallel and reduced in shard order. Results
// do not depend on the number of worker threads.
inline constexpr std::size_t kShardSize = 512;

DecaySeries decay_curve(const FrequencyAllocation& alloc, std::int64_t max_delta,
                        std::size_t samples, std::uint64_t seed, const DecayOptions& opts = {});

// mean |q . k| over the exact draws decay_curve uses, with no rotation.
double dot_product_statistic(std::size_t head_dim, std::size_t samples, std::uint64_t seed,
                             PairModel pairs = PairModel::matched);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double t_stat = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Nonnegative values per view laid out on the token grid.
struct FlowMap {
  GridShape grid;
  std::size_t views = 1;
  std::vector<double> values;  // views * rows * cols, view-major raster order
  std::string normalization = "mean_attention";

  FlowMap() = default;
  FlowMap(GridShape g, std::size_t v, std::string norm)
      : grid(g), views(v), values(v * g.size(), 0.0), normalization(std::move(norm)) {}

  double& at(std::size_t view, std::int64_t row, std::int64_t col) {
    return values[view * grid.size() + static_cast<std::size_t>(row * grid.cols + col)];
  }
  double at(std::size_t view, std::int64_t row, std::int64_t col) const {
    return values[view * grid.size() + static_cast<std::size_t>(row * grid.cols + col)];
  }
  double sum() const;
  Grid<double> averaged() const;
  bool all_finite() const;
};

FlowMap normalize_sum1(FlowMap map);

struct SpatialDecayMap {
  FlowMap map;  // mean |score| per cell, one view
  std::vector<double> std_error;
  // Paired statistics of |score(cell)| - |score(origin)| over common draws.
  std::vector<double> offset_mean;
  std::vector<double> offset_stderr;
  // Set when the allocation has no spatial pair; the map is then flat.
  bool no_spatial_pairs = false;
  std::size_t samples = 0;

  // max over cells of |offset_mean| / offset_stderr; 0/0 counts as 0 and
  // a nonzero mean over zero stderr as +inf.
  double max_offset_tstat() const;
};

// Query at (m0, 0, 0) against keys at (m0, x, y) for every cell (x, y) of
// the grid, with m0 = 0 so the origin cell is an exact unrotated dot product.
SpatialDecayMap spatial_decay_map(const FrequencyAllocation& alloc, GridShape grid,
                                  std::size_t samples, std::uint64_t seed,
                                  PairModel pairs = PairModel::matched);

// Mean attention from the text query rows to each image token.
FlowMap info_flow(const AttentionTrace& trace, const MultiViewLayout& layout);

struct PositionFlow {
  std::int64_t m = 0;
  double flow = 0.0;

  friend bool operator==(const PositionFlow&, const PositionFlow&) = default;
};

// Mean attention from generated-token rows to each image position m = 1..v,
// averaged over layers, heads, rows and steps. `layout` is the prompt layout
// before generation.
std::vector<PositionFlow> flow_by_position(std::span<const AttentionTrace> traces,
                                           const MultiViewLayout& layout);

// Mean of the bottom-quartile rows over the mean of the top-quartile rows of
// a single grid (at least one row each).
double bottom_top_ratio(const Grid<double>& map);

// Bottom/top quartile ratio of the view-averaged info_flow map for one
// encoding + mask pairing, over `seeds` independently seeded models and
// inputs (model seed = input seed = first_seed + i).
struct FlowTrend {
  Variant encoding = Variant::vanilla;
  MaskKind mask = MaskKind::causal;
  std::vector<double> ratios;

  double mean_ratio() const;
  // Fraction of seeds whose bottom quartile carries more mass than the top.
  double bottom_heavier_fraction() const;
};

FlowTrend image_flow_trend(ModelConfig base, const MultiViewLayout& layout, std::size_t seeds,
                           std::uint64_t first_seed = 0);

}  // namespace c2rope
