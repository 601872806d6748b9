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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "audio_io.hpp"
#include "layers.hpp"
#include "visual.hpp"

namespace elvc {

enum class ModelMode { kAudioOnly, kMultimodal, kMultimodalFt };

const char* model_mode_name(ModelMode mode) noexcept;
ModelMode parse_model_mode(const std::string& name);
inline bool uses_visual(ModelMode m) noexcept { return m != ModelMode::kAudioOnly; }

// Shape of the conversion stack. The default trunk is
// Conv1D(in -> conv_channels, k) -> ReLU -> GRU(-> gru_hidden) -> Linear(-> output_dim);
// a zero conv_channels or gru_hidden drops that stage.
struct ModelConfig {
  ModelMode mode = ModelMode::kAudioOnly;
  std::size_t acoustic_dim = kLmsDim;
  std::size_t visual_dim = 0;
  std::size_t visual_layers = 1;
  std::size_t conv_channels = 64;
  std::size_t kernel = 5;
  std::size_t gru_hidden = 64;
  std::size_t output_dim = kLmsDim;

  std::size_t trunk_input_dim() const noexcept {
    return acoustic_dim + (uses_visual(mode) ? visual_dim : 0);
  }
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Model {
  ModelConfig config;
  std::vector<Layer> trunk;
  std::optional<Layer> ft_gru;    // multimodal_ft only, visual_dim -> visual_dim
  FusionWeights fusion{1};        // multimodal modes; logits trainable
  std::optional<NormStats> norm;  // fitted on training visuals
  std::uint64_t seed = 0;

  struct ParamView {
    std::string name;
    LayerKind kind;   // owning layer kind; fusion logits report kLinear
    bool is_fusion = false;
    bool is_ft = false;
    std::span<double> values;
  };

  // Every trainable tensor in a fixed order: trunk layers, FT-GRU, fusion logits.
  std::vector<ParamView> parameters();
  std::size_t parameter_count() const;
};

using ParamGrads = std::vector<std::vector<double>>;

// Zero-initialized model with the configured shape.
Model build_model(const ModelConfig& cfg);

// Fan-in scaled uniform initialization of every weight; biases and fusion
// logits stay zero.
void initialize(Model& model, std::uint64_t seed);

struct ForwardCache {
  std::vector<LayerCache> trunk;
  LayerCache ft;
  LayeredFeatureSet visual;  // normalized visual input fed to fusion
  std::size_t valid = 0;     // rows past this are padding
};

// acoustic: T x acoustic_dim; visual: normalized, already at T rows, required
// iff the mode uses it. Rows at or past `valid` are padding; they are zeroed
// before every Conv1D so they cannot reach real frames.
Matrix forward(const Model& model, const Matrix& acoustic, const LayeredFeatureSet* visual,
               ForwardCache* cache, std::size_t valid = static_cast<std::size_t>(-1));

// Gradients aligned with model.parameters().
ParamGrads backward(const Model& model, const ForwardCache& cache, const Matrix& grad_out);

ParamGrads zero_grads(const Model& model);

// Applies persisted normalization then runs forward without caching.
FeatureMatrix convert(const Model& model, const FeatureMatrix& acoustic,
                      const LayeredFeatureSet* visual);

void save_checkpoint(const Model& model, const std::string& dir);
Model load_checkpoint(const std::string& dir);

}  // namespace elvc
