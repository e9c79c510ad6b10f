// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

// A small randomly initialised decoder-only transformer used as a testbed for
// positional encodings and attention masks.
//
// Block topology (pre-norm, no learned norm gains):
//   h  = x + Wo * concat_h softmax_mask(rot(Q_h) rot(K_h)^T / sqrt(d)) V_h
//   x' = h + W_down * gelu(W_up * rmsnorm(h))
// where Q, K, V are projections of rmsnorm(x). Logits come from a final
// rmsnorm followed by the output head. Weights are N(0, 1/fan_in).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "c2rope/attention_mask.hpp"
#include "c2rope/maskgen.hpp"
#include "c2rope/numkit.hpp"
#include "c2rope/posindex.hpp"
#include "c2rope/rotary.hpp"

namespace c2rope {

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t head_dim = 16;
  std::size_t vocab = 64;
  std::uint64_t seed = 0;
  Variant encoding = Variant::c2rope;
  MaskKind mask_kind = MaskKind::chebyshev;

  std::size_t model_dim() const { return heads * head_dim; }
  // Throws ConfigError, including when head_dim does not suit the encoding.
  void validate() const;
};

struct TokenSequence {
  MultiViewLayout layout;
  Matrix image_embeddings;  // image_count x model_dim
  std::vector<std::size_t> text_ids;

  void validate(const ModelConfig& cfg) const;
};

// Seeded Gaussian image embeddings and uniformly drawn text ids.
TokenSequence synthetic_sequence(const MultiViewLayout& layout, const ModelConfig& cfg,
                                 std::uint64_t seed);

// Post-softmax attention for every (layer, head).
class AttentionTrace {
 public:
  AttentionTrace() = default;
  AttentionTrace(std::size_t layers, std::size_t heads, std::size_t n);

  std::size_t layers() const { return layers_; }
  std::size_t heads() const { return heads_; }
  std::size_t size() const { return n_; }

  Matrix& at(std::size_t layer, std::size_t head) { return maps_[layer * heads_ + head]; }
  const Matrix& at(std::size_t layer, std::size_t head) const {
    return maps_[layer * heads_ + head];
  }

  friend bool operator==(const AttentionTrace&, const AttentionTrace&) = default;

 private:
  std::size_t layers_ = 0;
  std::size_t heads_ = 0;
  std::size_t n_ = 0;
  std::vector<Matrix> maps_;
};

struct LayerWeights {
  Matrix wq, wk, wv, wo;  // model_dim x model_dim
  Matrix w_up;            // model_dim x 2*model_dim
  Matrix w_down;          // 2*model_dim x model_dim
};

struct ModelWeights {
  Matrix token_embedding;  // vocab x model_dim
  std::vector<LayerWeights> layers;
  Matrix head;  // model_dim x vocab

  static ModelWeights random(const ModelConfig& cfg);
};

struct ForwardResult {
  Matrix logits;  // tokens x vocab
  AttentionTrace trace;
};

struct GenerationResult {
  std::vector<std::size_t> tokens;
  // traces[s] covers the sequence after the s-th generated token was
  // appended, so its last row is that token attending to everything before.
  std::vector<AttentionTrace> traces;
  TokenSequence sequence;  // input plus generated tokens
};

struct ForwardOptions {
  bool rotary = true;  // false bypasses rotation entirely (NoPE)
};

class ToyDecoder {
 public:
  explicit ToyDecoder(ModelConfig cfg);
  ToyDecoder(ModelConfig cfg, ModelWeights weights);

  const ModelConfig& config() const { return cfg_; }
  const ModelWeights& weights() const { return weights_; }
  const FrequencyAllocation& allocation() const { return alloc_; }

  // Indices from triplet_indices(layout), mask from build_mask(layout, kind).
  ForwardResult forward(const TokenSequence& seq) const;
  // Explicit indices and mask, for experiments that permute or zero them.
  ForwardResult forward(const TokenSequence& seq, std::span<const TripletIndex> indices,
                        const AttentionMask& mask, ForwardOptions opts = {}) const;

  // Greedy decoding, ties broken towards the lowest token id. Generated
  // tokens are text tokens, so they continue the (m, m, m) indexing.
  GenerationResult generate(const TokenSequence& seq, std::size_t steps) const;

 private:
  ModelConfig cfg_;
  FrequencyAllocation alloc_;
  ModelWeights weights_;
};

ForwardResult forward(const ModelConfig& cfg, const TokenSequence& seq);
GenerationResult generate(const ModelConfig& cfg, const TokenSequence& seq, std::size_t steps);

std::size_t argmax_lowest(std::span<const double> values);

}  // namespace c2rope
