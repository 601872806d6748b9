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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "audio_io.hpp"
#include "dsp.hpp"
#include "matrix.hpp"
#include "wsola.hpp"

namespace elvc {

// N x M matrix of non-negative frame distances (source rows, target columns).
struct CostMatrix {
  Matrix values;

  std::size_t source_len() const noexcept { return values.rows(); }
  std::size_t target_len() const noexcept { return values.cols(); }
};

struct AlignmentPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;

  double mean_cost() const { return pairs.empty() ? 0.0 : total_cost / static_cast<double>(pairs.size()); }
};

struct DtwOptions {
  // Sakoe-Chiba half-width around the slope-adjusted diagonal; none = unconstrained.
  std::optional<std::size_t> band;
};

// Minimum-cost monotonic path under unweighted steps (1,0), (0,1), (1,1).
// Backtracking prefers (1,1), then (1,0), then (0,1) among equal predecessors.
AlignmentPath dtw(const CostMatrix& c, const DtwOptions& opts = {});

// Empty string if the path is a valid N x M alignment, otherwise the reason.
std::string check_path(const AlignmentPath& p, std::size_t n, std::size_t m);

// Sum of cost entries visited by the path.
double path_cost(const AlignmentPath& p, const CostMatrix& c);

CostMatrix cost_matrix_mcc(const FeatureMatrix& src, const FeatureMatrix& tgt);
CostMatrix cost_matrix_landmarks(const LandmarkSequence& src, const LandmarkSequence& tgt);

struct FeatureConfig {
  StftConfig stft;
  MelConfig mel;
  MccConfig mcc;
};

FeatureMatrix extract_mcc(const Waveform& w, const FeatureConfig& cfg = {});

AlignmentPath align_dtw_mcc(const Waveform& el, const Waveform& nl, const FeatureConfig& cfg = {},
                            const DtwOptions& opts = {});

// Path in acoustic frames (video path expanded 4x).
AlignmentPath align_dtw_lip(const LandmarkSequence& el, const LandmarkSequence& nl,
                            const DtwOptions& opts = {});

struct WsolaAlignment {
  Waveform stretched_nl;
  AlignmentPath path;
};

WsolaAlignment align_dtw_wsola(const Waveform& el, const Waveform& nl, const FeatureConfig& cfg = {},
                               const WsolaConfig& wcfg = {}, const DtwOptions& opts = {});

// Map a 25 FPS path to 100 FPS: (i, j) -> (4i + k, 4j + k), k = 0..3. Each
// coordinate is held at its running max so the result stays a step path;
// repeats are dropped.
AlignmentPath expand_video_path(const AlignmentPath& p);

// Restrict a path to an N x M grid: pairs with i >= N are dropped, j is
// clamped to M - 1, duplicates removed.
AlignmentPath clip_path(const AlignmentPath& p, std::size_t n, std::size_t m);

// One output row per distinct source index, in increasing order; each row is
// the mean of the target rows paired with that index.
Matrix apply_warp(const AlignmentPath& p, const Matrix& tgt);

}  // namespace elvc
