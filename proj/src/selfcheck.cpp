// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/selfcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "c2rope/analysis.hpp"
#include "c2rope/errors.hpp"
#include "c2rope/maskgen.hpp"
#include "c2rope/numkit.hpp"
#include "c2rope/posindex.hpp"
#include "c2rope/rotary.hpp"
#include "c2rope/toynet.hpp"

namespace c2rope {
namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

TripletIndex random_index(SeededRng& rng, std::int64_t span) {
  auto draw = [&] {
    return static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(2 * span + 1)) -
           span;
  };
  return {draw(), draw(), draw()};
}

// Ring of a 0-based cell from half-unit distances to the grid center.
std::int64_t oracle_ring(std::int64_t row, std::int64_t col, GridShape g) {
  const std::int64_t dx2 = std::abs(2 * col + 1 - g.cols);
  const std::int64_t dy2 = std::abs(2 * row + 1 - g.rows);
  return std::max(dx2 / 2, dy2 / 2);
}

bool oracle_visible(const MultiViewLayout& l, std::size_t q, std::size_t k) {
  const std::size_t per_view = l.grid.size();
  const std::size_t v = l.image_count();
  if (q >= v) {
    return k <= q;
  }
  if (k >= v) {
    return false;
  }
  const std::size_t qv = q / per_view;
  const std::size_t kv = k / per_view;
  if (kv != qv) {
    return kv < qv;
  }
  const auto qp = static_cast<std::int64_t>(q % per_view);
  const auto kp = static_cast<std::int64_t>(k % per_view);
  return oracle_ring(kp / l.grid.cols, kp % l.grid.cols, l.grid) <=
         oracle_ring(qp / l.grid.cols, qp % l.grid.cols, l.grid);
}

CheckResult check_eq5_corners() {
  const auto t = triplet_indices({1, {4, 4}, 0});
  const bool corners = t[0] == TripletIndex{1, -1, 1} && t[3] == TripletIndex{4, 1, 1} &&
                       t[12] == TripletIndex{13, -1, -1} && t[15] == TripletIndex{16, 1, -1};
  const bool centre = t[5] == TripletIndex{6, 0, 0} && t[6] == TripletIndex{7, 0, 0} &&
                      t[9] == TripletIndex{10, 0, 0} && t[10] == TripletIndex{11, 0, 0};
  return {"triplet corners and centre on a 4x4 grid", corners && centre, false, ""};
}

CheckResult check_column_continuity() {
  std::size_t pairs = 0;
  std::size_t seam = 0;
  bool ok = true;
  for (std::int64_t rows = 1; rows <= 9; ++rows) {
    for (std::int64_t cols = 1; cols <= 9; ++cols) {
      const MultiViewLayout layout{2, {rows, cols}, 0};
      const auto t = triplet_indices(layout);
      for (std::size_t p = 0; p + static_cast<std::size_t>(cols) < t.size(); ++p) {
        const auto a = locate(layout, p);
        const auto b = locate(layout, p + static_cast<std::size_t>(cols));
        if (a.view != b.view) {
          continue;
        }
        ++pairs;
        const auto& ta = t[p];
        const auto& tb = t[p + static_cast<std::size_t>(cols)];
        const bool is_seam = rows % 2 == 0 && a.row == rows / 2 - 1;
        seam += is_seam ? 1 : 0;
        ok = ok && tb.m - ta.m == cols && tb.x == ta.x && ta.y - tb.y == (is_seam ? 0 : 1);
      }
    }
  }
  return {"column continuity (dy = 1 off the even-height centre seam)", ok, false,
          std::to_string(pairs) + " vertical pairs, " + std::to_string(seam) + " on the seam"};
}

CheckResult check_relative_identity() {
  SeededRng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const std::size_t d = std::array<std::size_t, 3>{16, 64, 128}[i % 3];
    const Variant variant = all_variants()[static_cast<std::size_t>(i / 3) % 4];
    const auto alloc = make_allocation(variant, d);
    const auto q = gaussian(rng, d);
    const auto k = gaussian(rng, d);
    const auto iq = random_index(rng, 600);
    const auto ik = random_index(rng, 600);
    worst = std::max(worst, std::abs(relative_score(q, k, iq, ik, alloc) -
                                     relative_score_single_rotation(q, k, iq, ik, alloc)));
  }
  return {"relative-position identity", worst <= 1e-9, false, "max dev " + fmt(worst)};
}

CheckResult check_isometry() {
  SeededRng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const auto alloc = make_allocation(all_variants()[static_cast<std::size_t>(i) % 4], 64);
    const auto v = gaussian(rng, 64);
    const auto r = apply_rotary(v, random_index(rng, 1000), alloc);
    worst = std::max(worst, std::abs(norm2(r) - norm2(v)));
  }
  return {"rotary isometry", worst <= 1e-9, false, "max dev " + fmt(worst)};
}

CheckResult check_text_path() {
  SeededRng rng(13);
  const auto c2 = make_allocation(Variant::c2rope, 128);
  const auto vanilla = make_allocation(Variant::vanilla, 128);
  const auto q = gaussian(rng, 128);
  const auto k = gaussian(rng, 128);
  double worst = 0.0;
  for (std::int64_t mq = 1; mq <= 512; mq += 7) {
    for (std::int64_t mk = 1; mk <= 512; mk += 5) {
      const TripletIndex iq{mq, mq, mq};
      const TripletIndex ik{mk, mk, mk};
      worst = std::max(worst, std::abs(relative_score(q, k, iq, ik, c2) -
                                       relative_score(q, k, iq, ik, vanilla)));
    }
  }
  return {"text-path equivalence (c2rope == vanilla on (m,m,m))", worst <= 1e-12, false,
          "max dev " + fmt(worst)};
}

CheckResult check_translation() {
  SeededRng rng(14);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto alloc = make_allocation(all_variants()[static_cast<std::size_t>(i) % 4], 32);
    const auto q = gaussian(rng, 32);
    const auto k = gaussian(rng, 32);
    auto iq = random_index(rng, 100);
    auto ik = random_index(rng, 100);
    const double before = relative_score(q, k, iq, ik, alloc);
    const auto shift = static_cast<std::int64_t>(rng.next_u64() % 200) - 100;
    switch (i % 3) {
      case 0:
        iq.m += shift, ik.m += shift;
        break;
      case 1:
        iq.x += shift, ik.x += shift;
        break;
      default:
        iq.y += shift, ik.y += shift;
        break;
    }
    worst = std::max(worst, std::abs(before - relative_score(q, k, iq, ik, alloc)));
  }
  return {"translation invariance", worst <= 1e-9, false, "max dev " + fmt(worst)};
}

CheckResult check_adjoint() {
  SeededRng rng(15);
  bool ok = true;
  double worst = 0.0;
  for (Variant variant : all_variants()) {
    const auto alloc = make_allocation(variant, 32);
    for (int i = 0; i < 20; ++i) {
      const auto idx = random_index(rng, 300);
      const LinearMap f = [&](std::span<const double> u) { return apply_rotary(u, idx, alloc); };
      const LinearMap adj = [&](std::span<const double> u) {
        return rotary_adjoint(u, idx, alloc);
      };
      const auto report = finite_diff_check(f, adj, 32, 1e-8, rng.next_u64());
      ok = ok && report.pass;
      worst = std::max({worst, report.inner_product_deviation, report.jacobian_deviation});
    }
  }
  return {"rotary adjoint (inner product + central differences)", ok, false,
          "max dev " + fmt(worst)};
}

CheckResult check_mask_oracle() {
  bool ok = true;
  std::size_t masks = 0;
  for (std::int64_t rows = 1; rows <= 6; ++rows) {
    for (std::int64_t cols = 1; cols <= 6; ++cols) {
      for (std::int64_t views = 1; views <= 2; ++views) {
        for (std::int64_t text = 0; text <= 4; ++text) {
          const MultiViewLayout layout{views, {rows, cols}, text};
          const auto mask = build_mask(layout, MaskKind::chebyshev);
          ++masks;
          for (std::size_t q = 0; q < mask.size() && ok; ++q) {
            for (std::size_t k = 0; k < mask.size(); ++k) {
              if (mask(q, k) != oracle_visible(layout, q, k)) {
                ok = false;
                break;
              }
            }
          }
          ok = ok && mask.is_well_formed();
        }
      }
    }
  }
  return {"Chebyshev mask matches per-entry oracle", ok, false,
          std::to_string(masks) + " layouts"};
}

CheckResult check_mask_count() {
  const auto mask = build_mask({1, {4, 4}, 2}, MaskKind::chebyshev);
  return {"Chebyshev 4x4 + 2 text has 243 visible entries", mask.visible_count() == 243, false,
          std::to_string(mask.visible_count())};
}

CheckResult check_trace_conservation() {
  ModelConfig cfg;
  cfg.seed = 5;
  const MultiViewLayout layout{2, {8, 8}, 16};
  const auto seq = synthetic_sequence(layout, cfg, 5);
  const ToyDecoder model(cfg);
  const auto result = model.forward(seq);
  const auto mask = build_mask(layout, cfg.mask_kind);
  double worst = 0.0;
  bool zeros = true;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const Matrix& a = result.trace.at(l, h);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) {
          s += a(r, c);
          zeros = zeros && (mask(r, c) || a(r, c) == 0.0);
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
  }
  return {"attention rows sum to 1, masked entries exactly 0", worst <= 1e-6 && zeros, false,
          "max row dev " + fmt(worst)};
}

CheckResult check_determinism() {
  ModelConfig cfg;
  cfg.seed = 6;
  const MultiViewLayout layout{1, {4, 4}, 3};
  const auto seq = synthetic_sequence(layout, cfg, 6);
  const auto a = forward(cfg, seq);
  const auto b = forward(cfg, seq);
  return {"forward pass determinism", a.logits == b.logits && a.trace == b.trace, false, ""};
}

CheckResult check_decay_trend() {
  const auto series = decay_curve(make_allocation(Variant::vanilla, 64), 256, 2000, 21,
                                  DecayOptions{Component::m, PairModel::matched, false});
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& b : series.bins) {
    x.push_back(static_cast<double>(b.delta));
    y.push_back(b.mean_abs_score);
  }
  const auto fit = fit_line(x, y);
  return {"vanilla long-term decay (negative slope, |t| > 3)", fit.slope < 0.0 && std::abs(fit.t_stat) > 3.0,
          false, "slope " + fmt(fit.slope) + ", t " + fmt(fit.t_stat)};
}

CheckResult check_spatial_sensitivity() {
  const GridShape grid{8, 8};
  const auto c2 = spatial_decay_map(make_allocation(Variant::c2rope, 64), grid, 2000, 22);
  const auto vanilla = spatial_decay_map(make_allocation(Variant::vanilla, 64), grid, 2000, 22);
  const bool ok = c2.max_offset_tstat() > 3.0 && vanilla.max_offset_tstat() <= 2.0;
  return {"spatial map: c2rope varies with offset, vanilla flat", ok, false,
          "c2rope t " + fmt(c2.max_offset_tstat()) + ", vanilla t " +
              fmt(vanilla.max_offset_tstat())};
}

CheckResult check_flow_trend() {
  const MultiViewLayout layout{1, {16, 16}, 8};
  ModelConfig base;
  base.encoding = Variant::vanilla;
  base.mask_kind = MaskKind::causal;
  const auto vanilla = image_flow_trend(base, layout, 20);
  base.encoding = Variant::c2rope;
  base.mask_kind = MaskKind::chebyshev;
  const auto c2 = image_flow_trend(base, layout, 20);
  const bool trend = vanilla.mean_ratio() > 1.0 &&
                     std::abs(c2.mean_ratio() - 1.0) < std::abs(vanilla.mean_ratio() - 1.0);
  return {"image flow bottom/top quartile ratio (vanilla+causal vs c2rope+chebyshev)", trend,
          true,
          "vanilla " + fmt(vanilla.mean_ratio()) + ", c2rope " + fmt(c2.mean_ratio()) +
              " over 20 seeds"};
}

}  // namespace

std::vector<CheckResult> run_selfcheck() {
  const std::vector<std::function<CheckResult()>> checks = {
      check_eq5_corners,       check_column_continuity,   check_relative_identity,
      check_isometry,          check_text_path,           check_translation,
      check_adjoint,           check_mask_oracle,         check_mask_count,
      check_trace_conservation, check_determinism,        check_decay_trend,
      check_spatial_sensitivity, check_flow_trend,
  };
  std::vector<CheckResult> results;
  for (const auto& check : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({"(check threw)", false, false, e.what()});
    }
  }
  return results;
}

}  // namespace c2rope
