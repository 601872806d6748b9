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

#include <span>
#include <vector>

#include "audio_io.hpp"
#include "matrix.hpp"

namespace elvc {

inline constexpr std::size_t kAcousticFramesPerVideoFrame = 4;

// Translate the points so their centroid is the origin.
LandmarkFrame center_landmarks(const LandmarkFrame& frame);

// Built-in extractor: centered landmarks flattened to (x1, y1, ..., x20, y20).
// Returns a single-layer set of shape T_v x 40.
LayeredFeatureSet landmark_features(const LandmarkSequence& seq);

// Repeat each video-rate row 4 times, then pad with the last row or truncate
// to exactly `audio_frames` rows.
Matrix upsample_to_audio(const Matrix& video_rate, std::size_t audio_frames);
LayeredFeatureSet upsample_to_audio(const LayeredFeatureSet& video_rate, std::size_t audio_frames);

// Per-layer, per-dimension standardization statistics.
struct NormStats {
  std::vector<std::vector<double>> mean;  // [layer][dim]
  std::vector<std::vector<double>> std;   // [layer][dim], already floored

  static constexpr double kStdFloor = 1e-6;

  std::size_t num_layers() const noexcept { return mean.size(); }
  std::size_t dim() const noexcept { return mean.empty() ? 0 : mean.front().size(); }

  // ELF1 form: L layers, each 2 x D (row 0 mean, row 1 std).
  LayeredFeatureSet to_feature_set() const;
  static NormStats from_feature_set(const LayeredFeatureSet& set);

  friend bool operator==(const NormStats&, const NormStats&) = default;
};

// Two-pass mean / population variance over every frame of every set.
NormStats fit_norm_stats(std::span<const LayeredFeatureSet> corpus);
LayeredFeatureSet apply_norm_stats(const LayeredFeatureSet& set, const NormStats& stats);

// Learnable convex combination of layers; weights = softmax(logits).
struct FusionWeights {
  std::vector<double> logits;

  explicit FusionWeights(std::size_t layers = 1) : logits(layers, 0.0) {}
  std::vector<double> weights() const;
};

std::vector<double> softmax(std::span<const double> logits);

Matrix weighted_sum(const LayeredFeatureSet& set, const FusionWeights& w);

// Gradient of a scalar loss w.r.t. the logits, given dLoss/dOutput.
std::vector<double> weighted_sum_logit_grad(const LayeredFeatureSet& set, const FusionWeights& w,
                                            const Matrix& grad_out);

}  // namespace elvc
