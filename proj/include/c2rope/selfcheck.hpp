// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace c2rope {

struct CheckResult {
  std::string name;
  bool pass = false;
  // Informational checks are reported but never fail the run.
  bool informational = false;
  std::string detail;
};

// Runs the invariant suite at reduced Monte-Carlo sizes.
std::vector<CheckResult> run_selfcheck();

}  // namespace c2rope
