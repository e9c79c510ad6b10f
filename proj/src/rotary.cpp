// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/rotary.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "c2rope/errors.hpp"

namespace c2rope {

std::string_view to_string(Component c) {
  switch (c) {
    case Component::m:
      return "m";
    case Component::x:
      return "x";
    case Component::y:
      return "y";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::vanilla:
      return "vanilla";
    case Variant::mrope_like:
      return "mrope_like";
    case Variant::videorope_like:
      return "videorope_like";
    case Variant::c2rope:
      return "c2rope";
  }
  return "?";
}

namespace {
constexpr std::array kVariants = {Variant::vanilla, Variant::mrope_like, Variant::videorope_like,
                                  Variant::c2rope};
}  // namespace

std::span<const Variant> all_variants() { return kVariants; }

Variant parse_variant(std::string_view label) {
  for (Variant v : kVariants) {
    if (to_string(v) == label) {
      return v;
    }
  }
  throw ConfigError("unknown encoding variant '" + std::string(label) +
                    "' (expected vanilla, mrope_like, videorope_like or c2rope)");
}

FrequencyAllocation::FrequencyAllocation(Variant variant, std::size_t head_dim,
                                         std::vector<RotaryPair> pairs)
    : variant_(variant), head_dim_(head_dim), pairs_(std::move(pairs)) {
  if (pairs_.size() * 2 != head_dim_) {
    throw ShapeError("allocation must hold head_dim/2 pairs");
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!(pairs_[i].theta > 0.0) || (i > 0 && pairs_[i].theta > pairs_[i - 1].theta)) {
      throw ConfigError("allocation thetas must be positive and non-increasing");
    }
  }
}

std::size_t FrequencyAllocation::count(Component c) const {
  return static_cast<std::size_t>(std::count_if(
      pairs_.begin(), pairs_.end(), [c](const RotaryPair& p) { return p.component == c; }));
}

std::vector<double> base_frequencies(std::size_t head_dim, double base) {
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw ShapeError("head dimension must be even and >= 2, got " + std::to_string(head_dim));
  }
  if (!(base > 1.0)) {
    throw ConfigError("frequency base must exceed 1");
  }
  std::vector<double> thetas(head_dim / 2);
  const auto d = static_cast<double>(head_dim);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    thetas[i] = std::pow(base, -2.0 * static_cast<double>(i) / d);
  }
  return thetas;
}

FrequencyAllocation make_allocation(Variant variant, std::size_t head_dim, double base) {
  const auto thetas = base_frequencies(head_dim, base);
  const std::size_t n = thetas.size();
  if (variant != Variant::vanilla && head_dim % 8 != 0) {
    throw ConfigError(std::string(to_string(variant)) + " needs head_dim divisible by 8, got " +
                      std::to_string(head_dim));
  }
  if (variant == Variant::c2rope && head_dim < 16) {
    throw ConfigError("c2rope needs head_dim >= 16 so x and y both get a pair, got " +
                      std::to_string(head_dim));
  }

  // [spatial_begin, n) or [0, spatial_end) alternate x, y; the rest is m.
  std::size_t spatial_begin = n;
  std::size_t spatial_end = n;
  switch (variant) {
    case Variant::vanilla:
      break;
    case Variant::mrope_like:
      spatial_begin = 0;
      spatial_end = 3 * n / 4;
      break;
    case Variant::videorope_like:
      spatial_begin = n / 2;
      break;
    case Variant::c2rope:
      spatial_begin = 3 * n / 4;
      break;
  }

  std::vector<RotaryPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].theta = thetas[i];
    if (i >= spatial_begin && i < spatial_end) {
      pairs[i].component = (i - spatial_begin) % 2 == 0 ? Component::x : Component::y;
    }
  }
  return FrequencyAllocation(variant, head_dim, std::move(pairs));
}

std::int64_t component_of(const TripletIndex& idx, Component c) {
  switch (c) {
    case Component::m:
      return idx.m;
    case Component::x:
      return idx.x;
    case Component::y:
      return idx.y;
  }
  return 0;
}

RotaryPhase::RotaryPhase(const TripletIndex& idx, const FrequencyAllocation& alloc) {
  const auto pairs = alloc.pairs();
  cos_.resize(pairs.size());
  sin_.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double angle = pairs[i].theta * static_cast<double>(component_of(idx, pairs[i].component));
    cos_[i] = std::cos(angle);
    sin_[i] = std::sin(angle);
  }
}

void RotaryPhase::rotate(std::span<double> vec, bool inverse) const {
  if (vec.size() != head_dim()) {
    throw ShapeError("rotary: vector length " + std::to_string(vec.size()) +
                     " does not match head_dim " + std::to_string(head_dim()));
  }
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    const double c = cos_[i];
    const double s = inverse ? -sin_[i] : sin_[i];
    const double a = vec[2 * i];
    const double b = vec[2 * i + 1];
    vec[2 * i] = a * c - b * s;
    vec[2 * i + 1] = a * s + b * c;
  }
}

std::vector<double> apply_rotary(std::span<const double> vec, const TripletIndex& idx,
                                 const FrequencyAllocation& alloc) {
  if (vec.size() != alloc.head_dim()) {
    throw ShapeError("apply_rotary: vector length does not match head_dim");
  }
  std::vector<double> out(vec.begin(), vec.end());
  RotaryPhase(idx, alloc).rotate(out);
  return out;
}

double relative_score(std::span<const double> q, std::span<const double> k,
                      const TripletIndex& idx_q, const TripletIndex& idx_k,
                      const FrequencyAllocation& alloc) {
  if (q.size() != k.size()) {
    throw ShapeError("relative_score: q and k lengths differ");
  }
  const auto rq = apply_rotary(q, idx_q, alloc);
  const auto rk = apply_rotary(k, idx_k, alloc);
  double s = 0.0;
  for (std::size_t i = 0; i < rq.size(); ++i) {
    s += rq[i] * rk[i];
  }
  return s;
}

double relative_score_single_rotation(std::span<const double> q, std::span<const double> k,
                                      const TripletIndex& idx_q, const TripletIndex& idx_k,
                                      const FrequencyAllocation& alloc) {
  if (q.size() != alloc.head_dim() || k.size() != alloc.head_dim()) {
    throw ShapeError("relative_score: vector length does not match head_dim");
  }
  const auto pairs = alloc.pairs();
  double s = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto delta = component_of(idx_q, pairs[i].component) -
                       component_of(idx_k, pairs[i].component);
    const double angle = pairs[i].theta * static_cast<double>(delta);
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    const double a = q[2 * i];
    const double b = q[2 * i + 1];
    s += (a * c - b * sn) * k[2 * i] + (a * sn + b * c) * k[2 * i + 1];
  }
  return s;
}

std::vector<double> rotary_adjoint(std::span<const double> cotangent, const TripletIndex& idx,
                                   const FrequencyAllocation& alloc) {
  if (cotangent.size() != alloc.head_dim()) {
    throw ShapeError("rotary_adjoint: vector length does not match head_dim");
  }
  std::vector<double> out(cotangent.begin(), cotangent.end());
  RotaryPhase(idx, alloc).rotate(out, /*inverse=*/true);
  return out;
}

}  // namespace c2rope
