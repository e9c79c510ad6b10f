// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "c2rope/posindex.hpp"
#include "c2rope/toynet.hpp"

namespace c2rope {

// Environment variable consulted for the output directory when --out is not
// given.
inline constexpr const char* kOutputDirEnv = "C2ROPE_OUT_DIR";

struct RunConfig {
  ModelConfig model;
  MultiViewLayout layout{1, {4, 4}, 4};
  std::size_t steps = 4;
  std::filesystem::path output_dir = "out";

  // Cross-field validation; throws ConfigError.
  void validate() const;
};

// "HxW" -> GridShape. Throws ConfigError.
GridShape parse_grid(std::string_view text);

// Applies `key = value` lines (with '#' comments) onto `cfg`. Keys: layers,
// heads, head_dim, vocab, seed, encoding, mask, grid, views, text, steps.
void apply_config_text(RunConfig& cfg, std::string_view text);

// Exit status: 0 success, 1 user error, 2 internal error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace c2rope
