// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "c2rope/errors.hpp"

namespace c2rope {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("ragged matrix literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out_row[j] += aik * b_row[j];
      }
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      t(j, i) = a(i, j);
    }
  }
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

Matrix masked_softmax_rows(const Matrix& logits, const AttentionMask& mask) {
  if (logits.rows() != mask.size() || logits.cols() != mask.size()) {
    throw ShapeError("masked_softmax_rows: logits and mask shapes differ");
  }
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    double row_max = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      if (mask(r, c)) {
        row_max = std::max(row_max, logits(r, c));
        any = true;
      }
    }
    if (!any) {
      throw DegenerateRowError("masked_softmax_rows: row " + std::to_string(r) +
                               " has no visible entry");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      if (mask(r, c)) {
        out(r, c) = std::exp(logits(r, c) - row_max);
        sum += out(r, c);
      }
    }
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      out(r, c) /= sum;
    }
  }
  return out;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t key = mix64(seed_ + kGolden) ^ mix64(stream_ * 0xD1B54A32D192ED03ULL + 1);
  return mix64(key + kGolden * ++counter_);
}

double SeededRng::uniform() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> gaussian(SeededRng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) {
    v = rng.normal();
  }
  return out;
}

AdjointReport finite_diff_check(const LinearMap& f, const LinearMap& adjoint, std::size_t dim,
                                double tol, std::uint64_t seed, std::size_t probes) {
  AdjointReport report;
  SeededRng rng(seed, 0xAD);
  for (std::size_t p = 0; p < probes; ++p) {
    const auto u = gaussian(rng, dim);
    const auto v = gaussian(rng, dim);
    const double lhs = dot(f(u), v);
    const double rhs = dot(u, adjoint(v));
    report.inner_product_deviation = std::max(report.inner_product_deviation, std::abs(lhs - rhs));
  }

  constexpr double h = 1e-4;
  std::vector<double> basis(dim, 0.0);
  std::vector<std::vector<double>> adjoint_rows(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    basis[i] = 1.0;
    adjoint_rows[i] = adjoint(basis);
    basis[i] = 0.0;
  }
  std::vector<double> probe(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    probe[j] = h;
    const auto plus = f(probe);
    probe[j] = -h;
    const auto minus = f(probe);
    probe[j] = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double jac = (plus[i] - minus[i]) / (2.0 * h);
      report.jacobian_deviation =
          std::max(report.jacobian_deviation, std::abs(jac - adjoint_rows[i][j]));
    }
  }
  report.pass = report.inner_product_deviation <= tol && report.jacobian_deviation <= tol;
  return report;
}

}  // namespace c2rope
