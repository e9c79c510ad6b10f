// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "c2rope/errors.hpp"
#include "c2rope/maskgen.hpp"
#include "c2rope/toynet.hpp"

namespace c2rope {
namespace {

ModelConfig small_config(Variant enc = Variant::c2rope, MaskKind mask = MaskKind::chebyshev) {
  ModelConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 16;
  cfg.vocab = 32;
  cfg.seed = 17;
  cfg.encoding = enc;
  cfg.mask_kind = mask;
  return cfg;
}

void expect_rows_conserve(const AttentionTrace& trace, const AttentionMask& mask) {
  for (std::size_t l = 0; l < trace.layers(); ++l) {
    for (std::size_t h = 0; h < trace.heads(); ++h) {
      const Matrix& a = trace.at(l, h);
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
          s += a(i, j);
          if (!mask(i, j)) {
            ASSERT_EQ(a(i, j), 0.0);
          }
        }
        ASSERT_NEAR(s, 1.0, 1e-6);
      }
    }
  }
}

TEST(ToyDecoder, ForwardIsDeterministic) {
  const auto cfg = small_config();
  const auto seq = synthetic_sequence({1, {4, 4}, 3}, cfg, 5);
  const auto a = forward(cfg, seq);
  const auto b = forward(cfg, seq);
  EXPECT_EQ(a.logits, b.logits);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.logits.rows(), 19u);
  EXPECT_EQ(a.logits.cols(), 32u);
}

TEST(ToyDecoder, TextOnlyC2ropeMatchesVanilla) {
  const auto c2 = small_config(Variant::c2rope, MaskKind::causal);
  const auto van = small_config(Variant::vanilla, MaskKind::causal);
  const auto seq = synthetic_sequence({0, {4, 4}, 12}, c2, 9);
  const auto a = forward(c2, seq);
  const auto b = forward(van, seq);
  EXPECT_LE(max_abs_diff(a.logits, b.logits), 1e-9);
}

TEST(ToyDecoder, MaskKindChangesImageAttention) {
  const auto seq = synthetic_sequence({1, {4, 4}, 2}, small_config(), 3);
  const auto cheb = forward(small_config(Variant::c2rope, MaskKind::chebyshev), seq);
  const auto caus = forward(small_config(Variant::c2rope, MaskKind::causal), seq);
  bool differs = false;
  for (std::size_t q = 0; q < 16 && !differs; ++q) {
    for (std::size_t k = 0; k < 16; ++k) {
      if (cheb.trace.at(0, 0)(q, k) != caus.trace.at(0, 0)(q, k)) {
        differs = true;
        break;
      }
    }
  }
  EXPECT_TRUE(differs);
}

TEST(ToyDecoder, TraceRowsSumToOneWithExactZeros) {
  for (MaskKind kind : {MaskKind::causal, MaskKind::chebyshev}) {
    const auto cfg = small_config(Variant::c2rope, kind);
    const MultiViewLayout layout{2, {4, 4}, 4};
    const auto res = forward(cfg, synthetic_sequence(layout, cfg, 1));
    expect_rows_conserve(res.trace, build_mask(layout, kind));
  }
}

TEST(ToyDecoder, ZeroIndicesMatchRotationBypass) {
  const auto cfg = small_config();
  const MultiViewLayout layout{1, {4, 4}, 4};
  const auto seq = synthetic_sequence(layout, cfg, 2);
  const ToyDecoder model(cfg);
  const std::vector<TripletIndex> zeros(layout.total());
  const auto mask = build_mask(layout, cfg.mask_kind);
  const auto zeroed = model.forward(seq, zeros, mask);
  const auto nope = model.forward(seq, zeros, mask, {.rotary = false});
  EXPECT_LE(max_abs_diff(zeroed.logits, nope.logits), 1e-9);
  const auto positioned = model.forward(seq);
  EXPECT_GT(max_abs_diff(positioned.logits, nope.logits), 1e-6);
}

TEST(ToyDecoder, SwappingImageTokensPermutesTextAttention) {
  const auto cfg = small_config();
  const MultiViewLayout layout{1, {4, 4}, 3};
  const auto seq = synthetic_sequence(layout, cfg, 4);
  const ToyDecoder model(cfg);
  const auto indices = triplet_indices(layout);
  const auto mask = build_mask(layout, cfg.mask_kind);

  const std::size_t n = layout.total();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[0], perm[10]);  // a ring-1 corner and a ring-0 centre token

  TokenSequence swapped = seq;
  std::vector<TripletIndex> swapped_idx(n);
  AttentionMask swapped_mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    swapped_idx[perm[i]] = indices[i];
    for (std::size_t j = 0; j < n; ++j) {
      swapped_mask.set(perm[i], perm[j], mask(i, j));
    }
  }
  for (std::size_t i = 0; i < layout.image_count(); ++i) {
    auto src = seq.image_embeddings.row(i);
    std::copy(src.begin(), src.end(), swapped.image_embeddings.row(perm[i]).begin());
  }

  const auto base = model.forward(seq, indices, mask);
  const auto moved = model.forward(swapped, swapped_idx, swapped_mask);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (std::size_t t = layout.image_count(); t < n; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
          ASSERT_NEAR(moved.trace.at(l, h)(t, perm[j]), base.trace.at(l, h)(t, j), 1e-12);
        }
      }
    }
  }
  for (std::size_t t = layout.image_count(); t < n; ++t) {
    for (std::size_t c = 0; c < cfg.vocab; ++c) {
      EXPECT_NEAR(moved.logits(t, c), base.logits(t, c), 1e-10);
    }
  }
}

TEST(ToyDecoder, LongSequenceStaysFinite) {
  const auto cfg = small_config();
  const MultiViewLayout layout{2, {16, 16}, 32};
  const auto res = forward(cfg, synthetic_sequence(layout, cfg, 8));
  EXPECT_EQ(res.logits.rows(), 544u);
  EXPECT_TRUE(res.logits.all_finite());
}

TEST(ToyDecoder, ConfigErrors) {
  auto cfg = small_config();
  cfg.head_dim = 8;
  EXPECT_THROW(ToyDecoder{cfg}, ConfigError);
  cfg = small_config();
  cfg.layers = 0;
  EXPECT_THROW(ToyDecoder{cfg}, ConfigError);
  cfg = small_config();
  cfg.head_dim = 7;
  cfg.encoding = Variant::vanilla;
  EXPECT_THROW(ToyDecoder{cfg}, ConfigError);
}

TEST(ToyDecoder, SequenceShapeErrors) {
  const auto cfg = small_config();
  auto seq = synthetic_sequence({1, {4, 4}, 2}, cfg, 0);
  seq.text_ids.push_back(0);
  EXPECT_THROW(forward(cfg, seq), ShapeError);
  seq.text_ids = {0, 99};
  EXPECT_THROW(forward(cfg, seq), InputError);
}

TEST(Generate, OneStepShape) {
  const auto cfg = small_config();
  const MultiViewLayout layout{1, {4, 4}, 2};
  const auto res = generate(cfg, synthetic_sequence(layout, cfg, 6), 1);
  ASSERT_EQ(res.tokens.size(), 1u);
  ASSERT_EQ(res.traces.size(), 1u);
  EXPECT_EQ(res.traces[0].size(), 19u);
  EXPECT_EQ(res.sequence.layout.text_len, 3);
  const Matrix& a = res.traces[0].at(1, 1);
  double s = 0.0;
  for (std::size_t j = 0; j < 19; ++j) {
    s += a(18, j);
  }
  EXPECT_NEAR(s, 1.0, 1e-9);
  EXPECT_LT(res.tokens[0], cfg.vocab);
}

TEST(Generate, IsDeterministic) {
  const auto cfg = small_config();
  const auto seq = synthetic_sequence({1, {4, 4}, 2}, cfg, 6);
  EXPECT_EQ(generate(cfg, seq, 5).tokens, generate(cfg, seq, 5).tokens);
  EXPECT_THROW(generate(cfg, seq, 0), InputError);
}

TEST(Generate, ZeroHeadPicksLowestId) {
  for (Variant v : {Variant::vanilla, Variant::c2rope}) {
    const auto cfg = small_config(v);
    auto weights = ModelWeights::random(cfg);
    weights.head = Matrix(cfg.model_dim(), cfg.vocab, 0.0);
    const ToyDecoder model(cfg, weights);
    const auto res = model.generate(synthetic_sequence({1, {4, 4}, 2}, cfg, 1), 4);
    EXPECT_EQ(res.tokens, (std::vector<std::size_t>{0, 0, 0, 0}));
  }
}

TEST(ArgmaxLowest, TieBreaksLow) {
  EXPECT_EQ(argmax_lowest(std::vector<double>{1, 3, 3, 2}), 1u);
  EXPECT_THROW(argmax_lowest(std::vector<double>{}), InputError);
}

}  // namespace
}  // namespace c2rope
