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

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "model.hpp"
#include "random.hpp"

namespace elvc {
namespace {

double half_sq_loss(const Model& m, const Matrix& x, const LayeredFeatureSet* vis, const Matrix& target) {
  const Matrix pred = forward(m, x, vis, nullptr);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data()[i] - target.data()[i];
    s += 0.5 * d * d;
  }
  return s;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

const char* row_kind(const Model::ParamView& p) {
  if (p.is_fusion) return "fusion";
  if (p.is_ft) return "ft_gru";
  return layer_kind_name(p.kind);
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& opts) {
  Rng rng(opts.seed);
  std::map<std::string, GradcheckRow> rows;
  for (const char* k : {"conv1d", "gru", "linear", "fusion", "ft_gru"}) rows[k].kind = k;

  for (std::size_t c = 0; c < opts.configs; ++c) {
    for (auto mode : {ModelMode::kAudioOnly, ModelMode::kMultimodal, ModelMode::kMultimodalFt}) {
      ModelConfig cfg;
      cfg.mode = mode;
      cfg.acoustic_dim = 2 + rng.below(5);
      cfg.output_dim = 2 + rng.below(5);
      cfg.conv_channels = 2 + rng.below(5);
      cfg.kernel = 1 + 2 * rng.below(3);
      cfg.gru_hidden = 2 + rng.below(5);
      if (uses_visual(mode)) {
        cfg.visual_dim = 2 + rng.below(5);
        cfg.visual_layers = 2 + rng.below(3);
      }
      const std::size_t frames = 2 + rng.below(7);

      Model model = build_model(cfg);
      initialize(model, rng.next());
      for (auto& p : model.parameters()) {
        for (double& v : p.values) v += 0.3 * rng.normal();
      }

      const Matrix x = random_matrix(rng, frames, cfg.acoustic_dim);
      const Matrix target = random_matrix(rng, frames, cfg.output_dim);
      LayeredFeatureSet vis;
      if (uses_visual(mode)) {
        for (std::size_t l = 0; l < cfg.visual_layers; ++l) vis.layers.push_back(random_matrix(rng, frames, cfg.visual_dim));
      }
      const LayeredFeatureSet* vp = uses_visual(mode) ? &vis : nullptr;

      ForwardCache cache;
      const Matrix pred = forward(model, x, vp, &cache);
      Matrix grad_out = pred;
      for (std::size_t i = 0; i < grad_out.size(); ++i) grad_out.data()[i] -= target.data()[i];
      const ParamGrads analytic = backward(model, cache, grad_out);

      auto params = model.parameters();
      std::map<std::string, bool> seen;
      for (std::size_t p = 0; p < params.size(); ++p) {
        auto& row = rows[row_kind(params[p])];
        if (!seen[row.kind]) {
          seen[row.kind] = true;
          ++row.configs;
        }
        for (std::size_t i = 0; i < params[p].values.size(); ++i) {
          double& v = params[p].values[i];
          const double saved = v;
          v = saved + opts.step;
          const double up = half_sq_loss(model, x, vp, target);
          v = saved - opts.step;
          const double down = half_sq_loss(model, x, vp, target);
          v = saved;
          const double numeric = (up - down) / (2.0 * opts.step);
          const double a = analytic[p][i];
          const double denom = std::max({std::abs(a), std::abs(numeric), opts.denominator_floor});
          row.max_rel_error = std::max(row.max_rel_error, std::abs(a - numeric) / denom);
          ++row.entries;
        }
      }
    }
  }

  GradcheckReport report;
  report.all_pass = true;
  for (const char* k : {"conv1d", "gru", "linear", "fusion", "ft_gru"}) {
    auto row = rows[k];
    row.pass = row.configs >= opts.configs && row.max_rel_error < opts.tolerance;
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace elvc
