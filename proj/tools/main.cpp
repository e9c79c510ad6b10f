// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "c2rope/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return c2rope::dispatch(args, std::cout, std::cerr);
}
