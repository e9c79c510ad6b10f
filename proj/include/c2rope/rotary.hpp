// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

// Rotary position encoding over triplet indices.
//
// A head of dimension d is split into d/2 rotation pairs (components 2i and
// 2i+1, 0-based). Pair i always rotates with frequency theta_i =
// base^(-2i/d); an allocation only decides which triplet component (m, x
// or y) drives the angle of each pair.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c2rope/posindex.hpp"

namespace c2rope {

enum class Component { m, x, y };

enum class Variant {
  vanilla,         // every pair on m
  mrope_like,      // spatial on the high-frequency 3/4, m on the low-frequency 1/4
  videorope_like,  // m on the high-frequency half, spatial on the low-frequency half
  c2rope,          // m on the high-frequency 3/4, spatial on the low-frequency 1/4
};

std::string_view to_string(Component c);
std::string_view to_string(Variant v);
// Throws ConfigError for an unknown label.
Variant parse_variant(std::string_view label);
std::span<const Variant> all_variants();

struct RotaryPair {
  Component component = Component::m;
  double theta = 1.0;

  friend bool operator==(const RotaryPair&, const RotaryPair&) = default;
};

class FrequencyAllocation {
 public:
  FrequencyAllocation(Variant variant, std::size_t head_dim, std::vector<RotaryPair> pairs);

  Variant variant() const { return variant_; }
  std::size_t head_dim() const { return head_dim_; }
  std::span<const RotaryPair> pairs() const { return pairs_; }
  std::size_t count(Component c) const;

 private:
  Variant variant_;
  std::size_t head_dim_;
  std::vector<RotaryPair> pairs_;
};

std::vector<double> base_frequencies(std::size_t head_dim, double base = 10000.0);

// Requirements: vanilla needs an even d >= 2; the other variants need d
// divisible by 8, and c2rope additionally d >= 16 so its spatial block holds
// at least one x pair and one y pair.
FrequencyAllocation make_allocation(Variant variant, std::size_t head_dim, double base = 10000.0);

// Precomputed per-pair cos/sin for one token index.
class RotaryPhase {
 public:
  RotaryPhase(const TripletIndex& idx, const FrequencyAllocation& alloc);

  std::size_t head_dim() const { return 2 * cos_.size(); }

  // In-place rotation of one head vector; `inverse` rotates by the negated
  // angles, which is the transpose.
  void rotate(std::span<double> vec, bool inverse = false) const;

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

std::int64_t component_of(const TripletIndex& idx, Component c);

std::vector<double> apply_rotary(std::span<const double> vec, const TripletIndex& idx,
                                 const FrequencyAllocation& alloc);

// <R(idx_q) q, R(idx_k) k>
double relative_score(std::span<const double> q, std::span<const double> k,
                      const TripletIndex& idx_q, const TripletIndex& idx_k,
                      const FrequencyAllocation& alloc);

// <R(idx_q - idx_k) q, k>: a single rotation by the index difference.
double relative_score_single_rotation(std::span<const double> q, std::span<const double> k,
                                      const TripletIndex& idx_q, const TripletIndex& idx_k,
                                      const FrequencyAllocation& alloc);

// Transpose of apply_rotary at `idx`.
std::vector<double> rotary_adjoint(std::span<const double> cotangent, const TripletIndex& idx,
                                   const FrequencyAllocation& alloc);

}  // namespace c2rope
