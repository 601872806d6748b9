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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "model.hpp"

namespace elvc {

struct TrainConfig {
  std::size_t batch_size = 16;
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainingExample {
  Matrix acoustic;                          // T x acoustic_dim
  std::optional<LayeredFeatureSet> visual;  // T rows, raw (not normalized)
  Matrix target;                            // T x output_dim
};

struct TrainResult {
  Model model;
  std::vector<double> loss_history;  // per-epoch mean frame-wise MSE
};

struct BatchLoss {
  double sum_sq = 0.0;       // squared error over valid frames
  std::size_t elements = 0;  // valid frames x output_dim
  ParamGrads grads;          // gradient of sum_sq / elements
};

// Loss and gradient of the masked mean squared error over a batch. With
// pad_to_longest every sequence is zero-padded to the batch maximum and the
// padded frames are masked out of loss and gradient. Visual inputs must
// already be normalized.
BatchLoss batch_loss(const Model& model, std::span<const TrainingExample* const> batch, bool pad_to_longest);

class Adam {
 public:
  Adam(const TrainConfig& cfg, const Model& model);
  void step(Model& model, const ParamGrads& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  ParamGrads m_, v_;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Builds and initializes a model from `model_cfg` (seeded by cfg.seed), fits
// visual normalization on the training set, then runs mini-batch Adam over
// length-bucketed batches.
TrainResult train(std::span<const TrainingExample> data, const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const EpochCallback& on_epoch = {});

// Continues training an existing model (its normalization stats are fitted
// first if absent).
TrainResult train_model(Model model, std::span<const TrainingExample> data, const TrainConfig& cfg,
                        const EpochCallback& on_epoch = {});

// Frame-wise MSE of the model over a dataset (raw visuals, normalized with
// the model's stats).
double evaluate_mse(const Model& model, std::span<const TrainingExample> data);

}  // namespace elvc
