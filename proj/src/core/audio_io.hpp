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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace elvc {

inline constexpr int kPipelineSampleRate = 16000;
inline constexpr std::size_t kLandmarksPerFrame = 20;
inline constexpr std::size_t kLmsDim = 80;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kPipelineSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
};

enum class FeatureKind { kLms, kMcc, kVisual, kOther };

struct FeatureMatrix {
  Matrix data;
  double frame_shift_s = 0.01;
  FeatureKind kind = FeatureKind::kOther;

  std::size_t frames() const noexcept { return data.rows(); }
  std::size_t dim() const noexcept { return data.cols(); }

  // Throws ShapeError if T or D is zero, an entry is non-finite, or an LMS
  // matrix is not 80-dimensional.
  void validate() const;
};

// Per-layer outputs of one feature extractor; every layer has the same shape.
struct LayeredFeatureSet {
  std::vector<Matrix> layers;
  std::string extractor_name;

  std::size_t num_layers() const noexcept { return layers.size(); }
  std::size_t frames() const noexcept { return layers.empty() ? 0 : layers.front().rows(); }
  std::size_t dim() const noexcept { return layers.empty() ? 0 : layers.front().cols(); }

  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

using LandmarkFrame = std::array<Point2, kLandmarksPerFrame>;
using LandmarkSequence = std::vector<LandmarkFrame>;

Waveform read_wav(const std::filesystem::path& path);
void write_wav(const Waveform& w, const std::filesystem::path& path);

// Quantizes one amplitude to the stored PCM16 value (clip, then round).
std::int16_t quantize_pcm16(double amplitude) noexcept;

LandmarkSequence read_landmarks(const std::filesystem::path& path);
void write_landmarks(const LandmarkSequence& seq, const std::filesystem::path& path);

// "ELF1" container: magic, u32 L, u32 T, u32 D, then L*T*D little-endian
// float64 values, layer-major then row-major.
LayeredFeatureSet read_feature_file(const std::filesystem::path& path);
void write_feature_file(const LayeredFeatureSet& set, const std::filesystem::path& path);

// Single-layer convenience wrappers.
Matrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const Matrix& m, const std::filesystem::path& path);

}  // namespace elvc
