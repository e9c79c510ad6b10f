// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "c2rope/errors.hpp"
#include "c2rope/numkit.hpp"

namespace c2rope {

std::string_view to_string(PairModel model) {
  return model == PairModel::matched ? "matched" : "independent";
}

PairModel parse_pair_model(std::string_view label) {
  if (label == "matched") {
    return PairModel::matched;
  }
  if (label == "independent") {
    return PairModel::independent;
  }
  throw ConfigError("unknown pair model '" + std::string(label) +
                    "' (expected matched or independent)");
}

namespace {

// Running sums for a set of bins.
struct Moments {
  std::vector<double> sum;
  std::vector<double> sum_sq;

  explicit Moments(std::size_t bins = 0) : sum(bins, 0.0), sum_sq(bins, 0.0) {}

  void add(std::size_t bin, double v) {
    sum[bin] += v;
    sum_sq[bin] += v * v;
  }
  void merge(const Moments& other) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += other.sum[i];
      sum_sq[i] += other.sum_sq[i];
    }
  }
  double mean(std::size_t bin, std::size_t n) const { return sum[bin] / static_cast<double>(n); }
  double std_error(std::size_t bin, std::size_t n) const {
    if (n < 2) {
      return 0.0;
    }
    const double nn = static_cast<double>(n);
    const double m = sum[bin] / nn;
    const double var = std::max(0.0, (sum_sq[bin] - nn * m * m) / (nn - 1.0));
    return std::sqrt(var / nn);
  }
};

struct QueryKeyDraw {
  std::vector<double> q;
  std::vector<double> k;
};

QueryKeyDraw draw_pair(SeededRng& rng, std::size_t d, PairModel pairs) {
  QueryKeyDraw draw;
  draw.q = gaussian(rng, d);
  draw.k = pairs == PairModel::matched ? draw.q : gaussian(rng, d);
  return draw;
}

// Runs `shard_fn(rng, count)` on fixed-size shards and merges the returned
// Moments in shard order.
template <typename ShardFn>
Moments run_shards(std::size_t samples, std::uint64_t seed, std::size_t bins, ShardFn shard_fn) {
  const std::size_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<std::future<Moments>> pending;
  pending.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t count = std::min(kShardSize, samples - s * kShardSize);
    pending.push_back(std::async(std::launch::async, [=] {
      SeededRng rng(seed, s);
      return shard_fn(rng, count);
    }));
  }
  Moments total(bins);
  for (auto& p : pending) {
    total.merge(p.get());
  }
  return total;
}

TripletIndex offset_index(Component c, std::int64_t delta) {
  TripletIndex idx;
  switch (c) {
    case Component::m:
      idx.m = delta;
      break;
    case Component::x:
      idx.x = delta;
      break;
    case Component::y:
      idx.y = delta;
      break;
  }
  return idx;
}

}  // namespace

DecaySeries decay_curve(const FrequencyAllocation& alloc, std::int64_t max_delta,
                        std::size_t samples, std::uint64_t seed, const DecayOptions& opts) {
  if (max_delta < 1) {
    throw InputError("decay_curve needs max_delta >= 1");
  }
  if (samples < 100) {
    throw InputError("decay_curve needs at least 100 samples");
  }
  const std::int64_t first = opts.include_zero ? 0 : 1;
  const auto bins = static_cast<std::size_t>(max_delta - first + 1);
  const std::size_t d = alloc.head_dim();

  std::vector<RotaryPhase> query_phases;
  query_phases.reserve(bins);
  for (std::int64_t delta = first; delta <= max_delta; ++delta) {
    query_phases.emplace_back(offset_index(opts.sweep, delta), alloc);
  }
  const RotaryPhase key_phase(TripletIndex{}, alloc);

  const Moments moments = run_shards(samples, seed, bins, [&](SeededRng& rng, std::size_t count) {
    Moments local(bins);
    std::vector<double> rq(d);
    for (std::size_t s = 0; s < count; ++s) {
      auto draw = draw_pair(rng, d, opts.pairs);
      key_phase.rotate(draw.k);
      for (std::size_t b = 0; b < bins; ++b) {
        std::copy(draw.q.begin(), draw.q.end(), rq.begin());
        query_phases[b].rotate(rq);
        local.add(b, std::abs(dot(rq, draw.k)));
      }
    }
    return local;
  });

  DecaySeries series;
  series.variant = alloc.variant();
  series.sweep = opts.sweep;
  series.pairs = opts.pairs;
  series.seed = seed;
  for (std::size_t b = 0; b < bins; ++b) {
    series.bins.push_back({first + static_cast<std::int64_t>(b), moments.mean(b, samples),
                           moments.std_error(b, samples), samples});
  }
  return series;
}

double dot_product_statistic(std::size_t head_dim, std::size_t samples, std::uint64_t seed,
                             PairModel pairs) {
  const Moments moments = run_shards(samples, seed, 1, [&](SeededRng& rng, std::size_t count) {
    Moments local(1);
    for (std::size_t s = 0; s < count; ++s) {
      const auto draw = draw_pair(rng, head_dim, pairs);
      local.add(0, std::abs(dot(draw.q, draw.k)));
    }
    return local;
  });
  return moments.mean(0, samples);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw InputError("fit_line needs matching x, y with at least 3 points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw InputError("fit_line: x values are all equal");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  fit.t_stat = fit.slope_stderr > 0.0
                   ? fit.slope / fit.slope_stderr
                   : std::copysign(std::numeric_limits<double>::infinity(), fit.slope);
  return fit;
}

double FlowMap::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

Grid<double> FlowMap::averaged() const {
  Grid<double> out(grid, 0.0);
  if (views == 0) {
    return out;
  }
  for (std::size_t v = 0; v < views; ++v) {
    for (std::size_t c = 0; c < grid.size(); ++c) {
      out.cells()[c] += values[v * grid.size() + c];
    }
  }
  for (auto& c : out.cells()) {
    c /= static_cast<double>(views);
  }
  return out;
}

bool FlowMap::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

FlowMap normalize_sum1(FlowMap map) {
  const double total = map.sum();
  if (!(total > 0.0)) {
    throw InputError("cannot normalise a flow map with no mass");
  }
  for (auto& v : map.values) {
    v /= total;
  }
  map.normalization = "sum1";
  return map;
}

double SpatialDecayMap::max_offset_tstat() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < offset_mean.size(); ++c) {
    if (offset_stderr[c] > 0.0) {
      worst = std::max(worst, std::abs(offset_mean[c]) / offset_stderr[c]);
    } else if (offset_mean[c] != 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

SpatialDecayMap spatial_decay_map(const FrequencyAllocation& alloc, GridShape grid,
                                  std::size_t samples, std::uint64_t seed, PairModel pairs) {
  grid.validate();
  if (samples < 100) {
    throw InputError("spatial_decay_map needs at least 100 samples");
  }
  const std::size_t cells = grid.size();
  const std::size_t d = alloc.head_dim();
  const auto coords = cartesian_coords(grid);
  std::vector<RotaryPhase> key_phases;
  key_phases.reserve(cells);
  for (const Coord& c : coords.cells()) {
    key_phases.emplace_back(TripletIndex{0, c.x, c.y}, alloc);
  }

  // Bins [0, cells) hold |score|, bins [cells, 2 cells) the paired offsets.
  const Moments moments =
      run_shards(samples, seed, 2 * cells, [&](SeededRng& rng, std::size_t count) {
        Moments local(2 * cells);
        std::vector<double> rk(d);
        for (std::size_t s = 0; s < count; ++s) {
          const auto draw = draw_pair(rng, d, pairs);
          const double origin = std::abs(dot(draw.q, draw.k));
          for (std::size_t c = 0; c < cells; ++c) {
            std::copy(draw.k.begin(), draw.k.end(), rk.begin());
            key_phases[c].rotate(rk);
            const double score = std::abs(dot(draw.q, rk));
            local.add(c, score);
            local.add(cells + c, score - origin);
          }
        }
        return local;
      });

  SpatialDecayMap out;
  out.map = FlowMap(grid, 1, "mean_abs_score");
  out.samples = samples;
  out.no_spatial_pairs = alloc.count(Component::x) + alloc.count(Component::y) == 0;
  out.std_error.resize(cells);
  out.offset_mean.resize(cells);
  out.offset_stderr.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    out.map.values[c] = moments.mean(c, samples);
    out.std_error[c] = moments.std_error(c, samples);
    out.offset_mean[c] = moments.mean(cells + c, samples);
    out.offset_stderr[c] = moments.std_error(cells + c, samples);
  }
  return out;
}

FlowMap info_flow(const AttentionTrace& trace, const MultiViewLayout& layout) {
  layout.validate();
  if (layout.text_len < 1) {
    throw InputError("info_flow needs at least one instruction (text) query");
  }
  if (trace.size() != layout.total()) {
    throw ShapeError("trace does not cover the layout");
  }
  const std::size_t v = layout.image_count();
  const std::size_t n = layout.total();
  FlowMap map(layout.grid, static_cast<std::size_t>(layout.views), "mean_attention");
  const double rows =
      static_cast<double>(trace.layers() * trace.heads() * static_cast<std::size_t>(layout.text_len));
  for (std::size_t l = 0; l < trace.layers(); ++l) {
    for (std::size_t h = 0; h < trace.heads(); ++h) {
      const Matrix& a = trace.at(l, h);
      for (std::size_t q = v; q < n; ++q) {
        for (std::size_t j = 0; j < v; ++j) {
          map.values[j] += a(q, j);
        }
      }
    }
  }
  for (auto& value : map.values) {
    value /= rows;
  }
  return map;
}

std::vector<PositionFlow> flow_by_position(std::span<const AttentionTrace> traces,
                                           const MultiViewLayout& layout) {
  layout.validate();
  if (traces.empty()) {
    throw InputError("flow_by_position needs at least one generation step");
  }
  const std::size_t v = layout.image_count();
  const std::size_t prompt = layout.total();
  std::vector<PositionFlow> series(v);
  for (std::size_t j = 0; j < v; ++j) {
    series[j].m = static_cast<std::int64_t>(j + 1);
  }
  for (const AttentionTrace& trace : traces) {
    if (trace.size() <= prompt) {
      throw InputError("trace has no generated-token rows");
    }
    const double rows =
        static_cast<double>(trace.layers() * trace.heads() * (trace.size() - prompt));
    for (std::size_t l = 0; l < trace.layers(); ++l) {
      for (std::size_t h = 0; h < trace.heads(); ++h) {
        const Matrix& a = trace.at(l, h);
        for (std::size_t q = prompt; q < trace.size(); ++q) {
          for (std::size_t j = 0; j < v; ++j) {
            series[j].flow += a(q, j) / rows;
          }
        }
      }
    }
  }
  for (auto& p : series) {
    p.flow /= static_cast<double>(traces.size());
  }
  return series;
}

double bottom_top_ratio(const Grid<double>& map) {
  const auto shape = map.shape();
  const std::int64_t band = std::max<std::int64_t>(1, shape.rows / 4);
  double top = 0.0;
  double bottom = 0.0;
  for (std::int64_t r = 0; r < band; ++r) {
    for (std::int64_t c = 0; c < shape.cols; ++c) {
      top += map.at(r, c);
      bottom += map.at(shape.rows - 1 - r, c);
    }
  }
  return bottom / top;
}

double FlowTrend::mean_ratio() const {
  if (ratios.empty()) {
    return 0.0;
  }
  return std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
}

double FlowTrend::bottom_heavier_fraction() const {
  if (ratios.empty()) {
    return 0.0;
  }
  const auto heavier = std::count_if(ratios.begin(), ratios.end(), [](double r) { return r > 1.0; });
  return static_cast<double>(heavier) / static_cast<double>(ratios.size());
}

FlowTrend image_flow_trend(ModelConfig base, const MultiViewLayout& layout, std::size_t seeds,
                           std::uint64_t first_seed) {
  FlowTrend trend;
  trend.encoding = base.encoding;
  trend.mask = base.mask_kind;
  for (std::size_t i = 0; i < seeds; ++i) {
    base.seed = first_seed + i;
    const ToyDecoder model(base);
    const auto seq = synthetic_sequence(layout, base, base.seed);
    const auto result = model.forward(seq);
    trend.ratios.push_back(bottom_top_ratio(info_flow(result.trace, layout).averaged()));
  }
  return trend;
}

}  // namespace c2rope
