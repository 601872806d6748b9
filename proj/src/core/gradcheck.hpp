// Copyright 2026 The elvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace elvc {

struct GradcheckOptions {
  std::uint64_t seed = 1;
  std::size_t configs = 20;  // random configurations per model mode
  double step = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double denominator_floor = 1e-6;
};

struct GradcheckRow {
  std::string kind;  // conv1d, gru, linear, fusion, ft_gru
  std::size_t configs = 0;
  std::size_t entries = 0;
  double max_rel_error = 0.0;
  bool pass = false;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  bool all_pass = false;
};

// Central finite-difference check of every trainable tensor on random small
// models (T <= 8, dims <= 6) in all three modes.
GradcheckReport run_gradcheck(const GradcheckOptions& opts = {});

}  // namespace elvc
