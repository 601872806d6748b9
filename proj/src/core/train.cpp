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

#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"
#include "random.hpp"

namespace elvc {
namespace {

Matrix pad_rows(const Matrix& m, std::size_t rows) {
  Matrix out(rows, m.cols());
  std::copy(m.data().begin(), m.data().end(), out.data().begin());
  return out;
}

LayeredFeatureSet pad_rows(const LayeredFeatureSet& s, std::size_t rows) {
  LayeredFeatureSet out;
  out.extractor_name = s.extractor_name;
  for (const auto& l : s.layers) out.layers.push_back(pad_rows(l, rows));
  return out;
}

void check_example(const Model& model, const TrainingExample& ex) {
  const auto& c = model.config;
  if (ex.acoustic.rows() == 0 || ex.acoustic.rows() != ex.target.rows()) {
    throw Error(Errc::kShapeError, "training pair has mismatched or empty frame counts");
  }
  if (ex.target.cols() != c.output_dim) {
    throw Error(Errc::kShapeError, "target has " + std::to_string(ex.target.cols()) + " dims, expected " +
                                       std::to_string(c.output_dim));
  }
  if (uses_visual(c.mode) != ex.visual.has_value()) {
    throw Error(Errc::kModeMismatch, std::string("training data visual presence does not match mode ") +
                                         model_mode_name(c.mode));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0 || !(learning_rate > 0.0) || !(epsilon > 0.0)) {
    throw Error(Errc::kConfigError, "batch_size, learning_rate and epsilon must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    throw Error(Errc::kConfigError, "Adam betas must lie in (0, 1)");
  }
}

BatchLoss batch_loss(const Model& model, std::span<const TrainingExample* const> batch, bool pad_to_longest) {
  BatchLoss out;
  out.grads = zero_grads(model);
  std::size_t t_max = 0;
  for (const auto* ex : batch) {
    t_max = std::max(t_max, ex->acoustic.rows());
    out.elements += ex->acoustic.rows() * model.config.output_dim;
  }
  if (out.elements == 0) return out;
  const double scale = 2.0 / static_cast<double>(out.elements);

  for (const auto* ex : batch) {
    const std::size_t valid = ex->acoustic.rows();
    const std::size_t rows = pad_to_longest ? t_max : valid;
    const Matrix acoustic = rows == valid ? ex->acoustic : pad_rows(ex->acoustic, rows);
    std::optional<LayeredFeatureSet> visual;
    if (ex->visual) visual = rows == valid ? *ex->visual : pad_rows(*ex->visual, rows);

    ForwardCache cache;
    const Matrix pred = forward(model, acoustic, visual ? &*visual : nullptr, &cache, valid);
    Matrix grad(rows, pred.cols());
    for (std::size_t t = 0; t < valid; ++t) {
      for (std::size_t d = 0; d < pred.cols(); ++d) {
        const double diff = pred(t, d) - ex->target(t, d);
        out.sum_sq += diff * diff;
        grad(t, d) = scale * diff;
      }
    }
    const ParamGrads g = backward(model, cache, grad);
    for (std::size_t p = 0; p < g.size(); ++p) {
      for (std::size_t i = 0; i < g[p].size(); ++i) out.grads[p][i] += g[p][i];
    }
  }
  return out;
}

Adam::Adam(const TrainConfig& cfg, const Model& model)
    : lr_(cfg.learning_rate), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.epsilon) {
  m_ = zero_grads(model);
  v_ = m_;
}

void Adam::step(Model& model, const ParamGrads& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto params = model.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto values = params[p].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grads[p][i];
      m_[p][i] = beta1_ * m_[p][i] + (1.0 - beta1_) * g;
      v_[p][i] = beta2_ * v_[p][i] + (1.0 - beta2_) * g * g;
      const double mhat = m_[p][i] / c1;
      const double vhat = v_[p][i] / c2;
      values[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

TrainResult train(std::span<const TrainingExample> data, const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  Model model = build_model(model_cfg);
  initialize(model, cfg.seed);
  return train_model(std::move(model), data, cfg, on_epoch);
}

TrainResult train_model(Model model, std::span<const TrainingExample> data, const TrainConfig& cfg,
                        const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.empty()) throw Error(Errc::kEmptyDataset, "no training utterances");
  for (const auto& ex : data) check_example(model, ex);

  std::vector<TrainingExample> prepared(data.begin(), data.end());
  if (uses_visual(model.config.mode)) {
    if (!model.norm) {
      std::vector<LayeredFeatureSet> visuals;
      for (const auto& ex : prepared) visuals.push_back(*ex.visual);
      model.norm = fit_norm_stats(visuals);
    }
    for (auto& ex : prepared) ex.visual = apply_norm_stats(*ex.visual, *model.norm);
  }

  // Length buckets: sort by frame count, chunk into batches.
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prepared[a].acoustic.rows() < prepared[b].acoustic.rows();
  });
  std::vector<std::vector<const TrainingExample*>> batches;
  for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
    std::vector<const TrainingExample*> b;
    for (std::size_t k = i; k < std::min(order.size(), i + cfg.batch_size); ++k) b.push_back(&prepared[order[k]]);
    batches.push_back(std::move(b));
  }

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Adam adam(cfg, model);
  TrainResult result;
  std::vector<std::size_t> batch_order(batches.size());
  std::iota(batch_order.begin(), batch_order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = batch_order.size(); i > 1; --i) {
      std::swap(batch_order[i - 1], batch_order[rng.below(i)]);
    }
    double sum_sq = 0.0;
    std::size_t elements = 0;
    for (std::size_t b : batch_order) {
      const BatchLoss bl = batch_loss(model, batches[b], true);
      sum_sq += bl.sum_sq;
      elements += bl.elements;
      adam.step(model, bl.grads);
    }
    const double loss = sum_sq / static_cast<double>(elements);
    result.loss_history.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }
  result.model = std::move(model);
  return result;
}

double evaluate_mse(const Model& model, std::span<const TrainingExample> data) {
  if (data.empty()) throw Error(Errc::kEmptyDataset, "no evaluation utterances");
  double sum_sq = 0.0;
  std::size_t elements = 0;
  for (const auto& ex : data) {
    check_example(model, ex);
    Matrix pred;
    if (ex.visual) {
      const auto vis = model.norm ? apply_norm_stats(*ex.visual, *model.norm) : *ex.visual;
      pred = forward(model, ex.acoustic, &vis, nullptr);
    } else {
      pred = forward(model, ex.acoustic, nullptr, nullptr);
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred.data()[i] - ex.target.data()[i];
      sum_sq += d * d;
    }
    elements += pred.size();
  }
  return sum_sq / static_cast<double>(elements);
}

}  // namespace elvc
