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

#include "visual.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace elvc {

LandmarkFrame center_landmarks(const LandmarkFrame& frame) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : frame) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(frame.size());
  cy /= static_cast<double>(frame.size());
  LandmarkFrame out;
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = {frame[i].x - cx, frame[i].y - cy};
  return out;
}

LayeredFeatureSet landmark_features(const LandmarkSequence& seq) {
  if (seq.empty()) throw Error(Errc::kEmptyInput, "landmark sequence has no frames");
  Matrix m(seq.size(), 2 * kLandmarksPerFrame);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto centered = center_landmarks(seq[t]);
    for (std::size_t p = 0; p < kLandmarksPerFrame; ++p) {
      m(t, 2 * p) = centered[p].x;
      m(t, 2 * p + 1) = centered[p].y;
    }
  }
  LayeredFeatureSet set;
  set.layers.push_back(std::move(m));
  set.extractor_name = "landmarks";
  return set;
}

Matrix upsample_to_audio(const Matrix& video_rate, std::size_t audio_frames) {
  if (video_rate.rows() == 0) throw Error(Errc::kEmptyInput, "no visual frames to upsample");
  Matrix out(audio_frames, video_rate.cols());
  for (std::size_t t = 0; t < audio_frames; ++t) {
    const std::size_t src = std::min(t / kAcousticFramesPerVideoFrame, video_rate.rows() - 1);
    std::copy(video_rate.row(src).begin(), video_rate.row(src).end(), out.row(t).begin());
  }
  return out;
}

LayeredFeatureSet upsample_to_audio(const LayeredFeatureSet& video_rate, std::size_t audio_frames) {
  LayeredFeatureSet out;
  out.extractor_name = video_rate.extractor_name;
  for (const auto& layer : video_rate.layers) out.layers.push_back(upsample_to_audio(layer, audio_frames));
  return out;
}

LayeredFeatureSet NormStats::to_feature_set() const {
  LayeredFeatureSet set;
  set.extractor_name = "norm_stats";
  for (std::size_t l = 0; l < mean.size(); ++l) {
    Matrix m(2, mean[l].size());
    std::copy(mean[l].begin(), mean[l].end(), m.row(0).begin());
    std::copy(std[l].begin(), std[l].end(), m.row(1).begin());
    set.layers.push_back(std::move(m));
  }
  return set;
}

NormStats NormStats::from_feature_set(const LayeredFeatureSet& set) {
  set.validate();
  if (set.frames() != 2) throw Error(Errc::kShapeError, "normalization stats need 2 rows per layer");
  NormStats s;
  for (const auto& layer : set.layers) {
    s.mean.emplace_back(layer.row(0).begin(), layer.row(0).end());
    s.std.emplace_back(layer.row(1).begin(), layer.row(1).end());
  }
  return s;
}

NormStats fit_norm_stats(std::span<const LayeredFeatureSet> corpus) {
  if (corpus.empty()) throw Error(Errc::kEmptyDataset, "cannot fit normalization on no data");
  const std::size_t layers = corpus.front().num_layers();
  const std::size_t dim = corpus.front().dim();
  std::size_t frames = 0;
  for (const auto& set : corpus) {
    set.validate();
    if (set.num_layers() != layers || set.dim() != dim) {
      throw Error(Errc::kShapeError, "visual feature sets disagree in layer count or dimension");
    }
    frames += set.frames();
  }

  NormStats s;
  s.mean.assign(layers, std::vector<double>(dim, 0.0));
  s.std.assign(layers, std::vector<double>(dim, 0.0));
  const double inv_n = 1.0 / static_cast<double>(frames);
  for (std::size_t l = 0; l < layers; ++l) {
    auto& mu = s.mean[l];
    for (const auto& set : corpus) {
      const auto& m = set.layers[l];
      for (std::size_t t = 0; t < m.rows(); ++t)
        for (std::size_t d = 0; d < dim; ++d) mu[d] += m(t, d);
    }
    for (double& v : mu) v *= inv_n;
    auto& sd = s.std[l];
    for (const auto& set : corpus) {
      const auto& m = set.layers[l];
      for (std::size_t t = 0; t < m.rows(); ++t)
        for (std::size_t d = 0; d < dim; ++d) {
          const double c = m(t, d) - mu[d];
          sd[d] += c * c;
        }
    }
    for (double& v : sd) v = std::max(std::sqrt(v * inv_n), NormStats::kStdFloor);
  }
  return s;
}

LayeredFeatureSet apply_norm_stats(const LayeredFeatureSet& set, const NormStats& stats) {
  set.validate();
  if (set.num_layers() != stats.num_layers() || set.dim() != stats.dim()) {
    throw Error(Errc::kShapeError, "normalization stats are " + std::to_string(stats.num_layers()) +
                                       "x" + std::to_string(stats.dim()) + ", features are " +
                                       std::to_string(set.num_layers()) + "x" +
                                       std::to_string(set.dim()));
  }
  LayeredFeatureSet out = set;
  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    auto& m = out.layers[l];
    for (std::size_t t = 0; t < m.rows(); ++t)
      for (std::size_t d = 0; d < m.cols(); ++d)
        m(t, d) = (m(t, d) - stats.mean[l][d]) / stats.std[l][d];
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> w(logits.begin(), logits.end());
  if (w.empty()) return w;
  const double top = *std::max_element(w.begin(), w.end());
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> FusionWeights::weights() const { return softmax(logits); }

Matrix weighted_sum(const LayeredFeatureSet& set, const FusionWeights& w) {
  set.validate();
  if (w.logits.size() != set.num_layers()) {
    throw Error(Errc::kShapeError, "fusion has " + std::to_string(w.logits.size()) +
                                       " weights for " + std::to_string(set.num_layers()) + " layers");
  }
  const auto weights = w.weights();
  Matrix out(set.frames(), set.dim());
  for (std::size_t l = 0; l < set.num_layers(); ++l) {
    const auto& src = set.layers[l].data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weights[l] * src[i];
  }
  return out;
}

std::vector<double> weighted_sum_logit_grad(const LayeredFeatureSet& set, const FusionWeights& w,
                                            const Matrix& grad_out) {
  const auto weights = w.weights();
  std::vector<double> dweight(set.num_layers(), 0.0);
  for (std::size_t l = 0; l < set.num_layers(); ++l) {
    const auto& src = set.layers[l].data();
    double acc = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) acc += grad_out.data()[i] * src[i];
    dweight[l] = acc;
  }
  double mean = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) mean += weights[l] * dweight[l];
  std::vector<double> grad(weights.size());
  for (std::size_t l = 0; l < weights.size(); ++l) grad[l] = weights[l] * (dweight[l] - mean);
  return grad;
}

}  // namespace elvc
