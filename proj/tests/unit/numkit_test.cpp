// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "c2rope/errors.hpp"
#include "c2rope/numkit.hpp"

namespace c2rope {
namespace {

Matrix random_matrix(SeededRng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (auto& v : m.data()) {
    v = rng.normal();
  }
  return m;
}

// Textbook triple loop, i-j-k order.
Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        s += a(i, k) * b(k, j);
      }
      out(i, j) = s;
    }
  }
  return out;
}

AttentionMask all_visible(std::size_t n) {
  AttentionMask mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      mask.set(i, j, true);
    }
  }
  return mask;
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Matrix m{{1.5, -2.0}, {0.25, 4.0}};
  EXPECT_EQ(matmul(Matrix::identity(2), m), m);
}

TEST(Matmul, HandCheckedTwoByTwo) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0}, {1}};
  EXPECT_EQ(matmul(a, b), (Matrix{{2}, {4}}));
}

TEST(Matmul, DimensionMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
}

TEST(Matmul, AgreesWithNaiveOracleOnAllShapesUpTo16) {
  SeededRng rng(7);
  for (std::size_t r = 1; r <= 16; r += 3) {
    for (std::size_t k = 1; k <= 16; k += 5) {
      for (std::size_t c = 1; c <= 16; c += 4) {
        const Matrix a = random_matrix(rng, r, k);
        const Matrix b = random_matrix(rng, k, c);
        EXPECT_LE(max_abs_diff(matmul(a, b), naive_product(a, b)), 1e-12)
            << r << "x" << k << " * " << k << "x" << c;
      }
    }
  }
  const Matrix a = random_matrix(rng, 8, 8);
  const Matrix b = random_matrix(rng, 8, 8);
  EXPECT_LE(max_abs_diff(matmul(a, b), naive_product(a, b)), 1e-12);
}

TEST(MaskedSoftmax, UniformRow) {
  const auto p = masked_softmax_rows(Matrix(4, 4, 1.0), all_visible(4));
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(p(0, c), 0.25);
  }
}

TEST(MaskedSoftmax, SingleVisibleEntryTakesAllMass) {
  AttentionMask mask(2);
  mask.set(0, 0, true);
  mask.set(1, 0, true);
  mask.set(1, 1, true);
  const auto p = masked_softmax_rows(Matrix{{5, 5}, {0, 0}}, mask);
  EXPECT_EQ(p(0, 0), 1.0);
  EXPECT_EQ(p(0, 1), 0.0);
}

TEST(MaskedSoftmax, LogThreeRow) {
  AttentionMask mask = all_visible(2);
  const auto p = masked_softmax_rows(Matrix{{0.0, std::log(3.0)}, {0, 0}}, mask);
  EXPECT_NEAR(p(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.75, 1e-15);
}

TEST(MaskedSoftmax, FullyMaskedRowThrows) {
  AttentionMask mask(2);
  mask.set(0, 0, true);
  EXPECT_THROW(masked_softmax_rows(Matrix(2, 2), mask), DegenerateRowError);
}

TEST(MaskedSoftmax, HugeLogitsStayFinite) {
  const auto p = masked_softmax_rows(Matrix{{1000.0, 999.0}, {-1000.0, -1001.0}}, all_visible(2));
  EXPECT_TRUE(p.all_finite());
  EXPECT_NEAR(p(0, 0), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
}

TEST(MaskedSoftmax, RowsSumToOneAndAreShiftInvariant) {
  SeededRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 12;
    Matrix logits = random_matrix(rng, n, n);
    AttentionMask mask(n);
    for (std::size_t i = 0; i < n; ++i) {
      mask.set(i, i, true);
      for (std::size_t j = 0; j < n; ++j) {
        if (rng.uniform() < 0.5) {
          mask.set(i, j, true);
        }
      }
    }
    const auto p = masked_softmax_rows(logits, mask);
    Matrix shifted = logits;
    for (std::size_t i = 0; i < n; ++i) {
      const double shift = 10.0 * rng.normal();
      for (std::size_t j = 0; j < n; ++j) {
        shifted(i, j) += shift;
      }
    }
    const auto q = masked_softmax_rows(shifted, mask);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += p(i, j);
        if (!mask(i, j)) {
          EXPECT_EQ(p(i, j), 0.0);
        }
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
    EXPECT_LE(max_abs_diff(p, q), 1e-12);
  }
}

TEST(SeededRng, SameSeedSameSequence) {
  SeededRng a(42);
  SeededRng b(42);
  EXPECT_EQ(gaussian(a, 4), gaussian(b, 4));
}

TEST(SeededRng, DifferentSeedsDiffer) {
  SeededRng a(42);
  SeededRng b(43);
  EXPECT_NE(gaussian(a, 4), gaussian(b, 4));
}

TEST(SeededRng, StreamsAreIndependentOfConsumptionOrder) {
  SeededRng root(9);
  SeededRng s1 = root.split(1);
  SeededRng s2 = root.split(2);
  const auto a1 = gaussian(s1, 8);
  const auto a2 = gaussian(s2, 8);
  SeededRng t2 = root.split(2);
  SeededRng t1 = root.split(1);
  EXPECT_EQ(gaussian(t2, 8), a2);
  EXPECT_EQ(gaussian(t1, 8), a1);
  EXPECT_NE(a1, a2);
}

TEST(SeededRng, FrozenGoldenValues) {
  // Frozen from the first run. Any change to the generator would silently
  // move every Monte-Carlo result, so it has to show up here.
  SeededRng rng(42);
  EXPECT_EQ(rng.next_u64(), 4299003450801849594ULL);
  EXPECT_DOUBLE_EQ(rng.normal(), -0.59553908853309423);
  EXPECT_EQ(rng.counter(), 3u);
}

TEST(SeededRng, GaussianMomentsFollowLawOfLargeNumbers) {
  SeededRng rng(2024);
  const auto xs = gaussian(rng, 100000);
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) {
    var += (x - mean) * (x - mean);
  }
  var /= static_cast<double>(xs.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(SeededRng, UniformStaysInOpenInterval) {
  SeededRng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(FiniteDiffCheck, IdentityPasses) {
  const LinearMap id = [](std::span<const double> u) {
    return std::vector<double>(u.begin(), u.end());
  };
  const auto report = finite_diff_check(id, id, 6, 1e-12);
  EXPECT_TRUE(report.pass) << report.inner_product_deviation << " " << report.jacobian_deviation;
}

TEST(FiniteDiffCheck, MismatchedAdjointFails) {
  auto scale = [](double s) {
    return LinearMap([s](std::span<const double> u) {
      std::vector<double> out(u.begin(), u.end());
      for (auto& v : out) {
        v *= s;
      }
      return out;
    });
  };
  const auto report = finite_diff_check(scale(2.0), scale(3.0), 6, 1e-8);
  EXPECT_FALSE(report.pass);
  EXPECT_GT(report.jacobian_deviation, 0.9);
}

TEST(FiniteDiffCheck, NonSymmetricMatrixWithItsTranspose) {
  SeededRng rng(5);
  const Matrix a = random_matrix(rng, 5, 5);
  auto apply = [](const Matrix& m) {
    return LinearMap([m](std::span<const double> u) {
      Matrix col(u.size(), 1);
      for (std::size_t i = 0; i < u.size(); ++i) {
        col(i, 0) = u[i];
      }
      const Matrix r = matmul(m, col);
      return std::vector<double>(r.data().begin(), r.data().end());
    });
  };
  EXPECT_TRUE(finite_diff_check(apply(a), apply(transpose(a)), 5, 1e-8).pass);
  EXPECT_FALSE(finite_diff_check(apply(a), apply(a), 5, 1e-8).pass);
}

}  // namespace
}  // namespace c2rope
