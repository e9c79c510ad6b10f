// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal deterministic numeric kernel: dense row-major matrices, masked
// row softmax, a counter-based seeded RNG and an adjoint/finite-difference
// checker for linear maps. Everything is double precision.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "c2rope/attention_mask.hpp"

namespace c2rope {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Softmax over each row restricted to the visible entries of `mask`. The max
// is taken over visible logits only and hidden entries come out as exact 0.
// Throws DegenerateRowError for a row with no visible entry.
Matrix masked_softmax_rows(const Matrix& logits, const AttentionMask& mask);

// Counter-based generator: the n-th draw of (seed, stream) is a pure hash of
// (seed, stream, n), so streams can be split across workers and replayed
// without touching shared state.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  // Independent generator for `stream` under the same seed.
  SeededRng split(std::uint64_t stream) const { return SeededRng(seed_, stream); }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  // Standard normal via Box-Muller (cosine branch, two draws per sample).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

std::vector<double> gaussian(SeededRng& rng, std::size_t n);

using LinearMap = std::function<std::vector<double>(std::span<const double>)>;

struct AdjointReport {
  bool pass = false;
  // max |<f(u), v> - <u, adjoint(v)>| over the random probes
  double inner_product_deviation = 0.0;
  // max |J(i, j) - adjoint(e_i)[j]| with J from central differences
  double jacobian_deviation = 0.0;
};

// Checks that `adjoint` is the transpose of the linear map `f` on dim-vectors:
// inner-product identity on `probes` random (u, v) pairs, then the full
// central-difference Jacobian of f against the rows produced by `adjoint`.
AdjointReport finite_diff_check(const LinearMap& f, const LinearMap& adjoint, std::size_t dim,
                                double tol, std::uint64_t seed = 0, std::size_t probes = 8);

}  // namespace c2rope
