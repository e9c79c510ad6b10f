// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/toynet.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "c2rope/errors.hpp"

namespace c2rope {

void ModelConfig::validate() const {
  if (layers == 0 || heads == 0 || vocab == 0) {
    throw ConfigError("layers, heads and vocab must all be >= 1");
  }
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw ConfigError("head_dim must be even and >= 2, got " + std::to_string(head_dim));
  }
  make_allocation(encoding, head_dim);
}

void TokenSequence::validate(const ModelConfig& cfg) const {
  layout.validate();
  if (image_embeddings.rows() != layout.image_count()) {
    throw ShapeError("sequence has " + std::to_string(image_embeddings.rows()) +
                     " image embeddings but the layout needs " +
                     std::to_string(layout.image_count()));
  }
  if (layout.image_count() > 0 && image_embeddings.cols() != cfg.model_dim()) {
    throw ShapeError("image embedding width " + std::to_string(image_embeddings.cols()) +
                     " does not match model_dim " + std::to_string(cfg.model_dim()));
  }
  if (text_ids.size() != static_cast<std::size_t>(layout.text_len)) {
    throw ShapeError("text id count does not match layout text length");
  }
  for (auto id : text_ids) {
    if (id >= cfg.vocab) {
      throw InputError("text id " + std::to_string(id) + " outside vocabulary");
    }
  }
}

TokenSequence synthetic_sequence(const MultiViewLayout& layout, const ModelConfig& cfg,
                                 std::uint64_t seed) {
  layout.validate();
  TokenSequence seq;
  seq.layout = layout;
  seq.image_embeddings = Matrix(layout.image_count(), cfg.model_dim());
  SeededRng image_rng(seed, 1);
  for (auto& v : seq.image_embeddings.data()) {
    v = image_rng.normal();
  }
  SeededRng text_rng(seed, 2);
  seq.text_ids.resize(static_cast<std::size_t>(layout.text_len));
  for (auto& id : seq.text_ids) {
    id = static_cast<std::size_t>(text_rng.next_u64() % cfg.vocab);
  }
  return seq;
}

AttentionTrace::AttentionTrace(std::size_t layers, std::size_t heads, std::size_t n)
    : layers_(layers), heads_(heads), n_(n), maps_(layers * heads, Matrix(n, n)) {}

namespace {

Matrix random_matrix(SeededRng& rng, std::size_t rows, std::size_t cols, std::size_t fan_in) {
  Matrix m(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : m.data()) {
    v = rng.normal() * scale;
  }
  return m;
}

void rms_norm_rows(Matrix& x) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    double ss = 0.0;
    for (double v : row) {
      ss += v * v;
    }
    const double inv = 1.0 / std::sqrt(ss / static_cast<double>(row.size()) + 1e-6);
    for (double& v : row) {
      v *= inv;
    }
  }
}

Matrix rms_normed(const Matrix& x) {
  Matrix out = x;
  rms_norm_rows(out);
  return out;
}

double gelu(double v) {
  constexpr double k = 0.7978845608028654;  // sqrt(2 / pi)
  return 0.5 * v * (1.0 + std::tanh(k * (v + 0.044715 * v * v * v)));
}

// Columns [begin, begin + width) of x.
Matrix column_block(const Matrix& x, std::size_t begin, std::size_t width) {
  Matrix out(x.rows(), width);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out(r, c) = x(r, begin + c);
    }
  }
  return out;
}

FrequencyAllocation checked_allocation(const ModelConfig& cfg) {
  cfg.validate();
  return make_allocation(cfg.encoding, cfg.head_dim);
}

}  // namespace

ModelWeights ModelWeights::random(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.model_dim();
  SeededRng rng(cfg.seed, 0x5EED);
  ModelWeights w;
  w.token_embedding = random_matrix(rng, cfg.vocab, dim, 1);
  w.layers.resize(cfg.layers);
  for (auto& layer : w.layers) {
    layer.wq = random_matrix(rng, dim, dim, dim);
    layer.wk = random_matrix(rng, dim, dim, dim);
    layer.wv = random_matrix(rng, dim, dim, dim);
    layer.wo = random_matrix(rng, dim, dim, dim);
    layer.w_up = random_matrix(rng, dim, 2 * dim, dim);
    layer.w_down = random_matrix(rng, 2 * dim, dim, 2 * dim);
  }
  w.head = random_matrix(rng, dim, cfg.vocab, dim);
  return w;
}

ToyDecoder::ToyDecoder(ModelConfig cfg)
    : cfg_(cfg), alloc_(checked_allocation(cfg_)), weights_(ModelWeights::random(cfg_)) {}

ToyDecoder::ToyDecoder(ModelConfig cfg, ModelWeights weights)
    : cfg_(cfg), alloc_(checked_allocation(cfg_)), weights_(std::move(weights)) {
  const std::size_t dim = cfg_.model_dim();
  if (weights_.layers.size() != cfg_.layers || weights_.token_embedding.rows() != cfg_.vocab ||
      weights_.token_embedding.cols() != dim || weights_.head.rows() != dim ||
      weights_.head.cols() != cfg_.vocab) {
    throw ShapeError("model weights do not match the configuration");
  }
}

ForwardResult ToyDecoder::forward(const TokenSequence& seq) const {
  seq.validate(cfg_);
  const auto indices = triplet_indices(seq.layout);
  return forward(seq, indices, build_mask(seq.layout, cfg_.mask_kind));
}

ForwardResult ToyDecoder::forward(const TokenSequence& seq, std::span<const TripletIndex> indices,
                                  const AttentionMask& mask, ForwardOptions opts) const {
  seq.validate(cfg_);
  const std::size_t n = seq.layout.total();
  const std::size_t dim = cfg_.model_dim();
  const std::size_t d = cfg_.head_dim;
  if (indices.size() != n || mask.size() != n) {
    throw ShapeError("indices and mask must cover every token of the sequence");
  }

  Matrix x(n, dim);
  const std::size_t v = seq.layout.image_count();
  for (std::size_t t = 0; t < v; ++t) {
    auto src = seq.image_embeddings.row(t);
    std::copy(src.begin(), src.end(), x.row(t).begin());
  }
  for (std::size_t t = 0; t < seq.text_ids.size(); ++t) {
    auto src = weights_.token_embedding.row(seq.text_ids[t]);
    std::copy(src.begin(), src.end(), x.row(v + t).begin());
  }

  std::vector<RotaryPhase> phases;
  if (opts.rotary) {
    phases.reserve(n);
    for (const auto& idx : indices) {
      phases.emplace_back(idx, alloc_);
    }
  }

  ForwardResult result;
  result.trace = AttentionTrace(cfg_.layers, cfg_.heads, n);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    const LayerWeights& w = weights_.layers[l];
    const Matrix h = rms_normed(x);
    const Matrix q = matmul(h, w.wq);
    const Matrix k = matmul(h, w.wk);
    const Matrix val = matmul(h, w.wv);

    Matrix attended(n, dim);
    for (std::size_t head = 0; head < cfg_.heads; ++head) {
      Matrix qh = column_block(q, head * d, d);
      Matrix kh = column_block(k, head * d, d);
      const Matrix vh = column_block(val, head * d, d);
      if (opts.rotary) {
        for (std::size_t t = 0; t < n; ++t) {
          phases[t].rotate(qh.row(t));
          phases[t].rotate(kh.row(t));
        }
      }
      Matrix scores = matmul(qh, transpose(kh));
      for (auto& s : scores.data()) {
        s *= inv_sqrt_d;
      }
      Matrix attn = masked_softmax_rows(scores, mask);
      const Matrix out = matmul(attn, vh);
      for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t c = 0; c < d; ++c) {
          attended(t, head * d + c) = out(t, c);
        }
      }
      result.trace.at(l, head) = std::move(attn);
    }
    const Matrix projected = matmul(attended, w.wo);
    for (std::size_t i = 0; i < x.data().size(); ++i) {
      x.data()[i] += projected.data()[i];
    }

    Matrix up = matmul(rms_normed(x), w.w_up);
    for (auto& u : up.data()) {
      u = gelu(u);
    }
    const Matrix down = matmul(up, w.w_down);
    for (std::size_t i = 0; i < x.data().size(); ++i) {
      x.data()[i] += down.data()[i];
    }
  }

  rms_norm_rows(x);
  result.logits = matmul(x, weights_.head);
  return result;
}

GenerationResult ToyDecoder::generate(const TokenSequence& seq, std::size_t steps) const {
  if (steps == 0) {
    throw InputError("generate needs steps >= 1");
  }
  GenerationResult result;
  result.sequence = seq;
  ForwardResult current = forward(result.sequence);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto last = current.logits.row(current.logits.rows() - 1);
    const std::size_t token = argmax_lowest(last);
    result.tokens.push_back(token);
    result.sequence.text_ids.push_back(token);
    result.sequence.layout.text_len += 1;
    current = forward(result.sequence);
    result.traces.push_back(current.trace);
  }
  return result;
}

ForwardResult forward(const ModelConfig& cfg, const TokenSequence& seq) {
  return ToyDecoder(cfg).forward(seq);
}

GenerationResult generate(const ModelConfig& cfg, const TokenSequence& seq, std::size_t steps) {
  return ToyDecoder(cfg).generate(seq, steps);
}

std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) {
    throw InputError("argmax of an empty vector");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}

}  // namespace c2rope
