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

#include "align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "visual.hpp"

namespace elvc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_band(std::size_t i, std::size_t j, std::size_t n, std::size_t m, const DtwOptions& opts) {
  if (!opts.band) return true;
  const double expected =
      n > 1 ? static_cast<double>(i) * static_cast<double>(m - 1) / static_cast<double>(n - 1) : 0.0;
  return std::abs(static_cast<double>(j) - expected) <= static_cast<double>(*opts.band);
}

}  // namespace

AlignmentPath dtw(const CostMatrix& c, const DtwOptions& opts) {
  const std::size_t n = c.source_len();
  const std::size_t m = c.target_len();
  if (n == 0 || m == 0) throw Error(Errc::kEmptyInput, "DTW needs a non-empty cost matrix");
  for (double v : c.values.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::kInvalidArgument, "cost entries must be finite and non-negative");
    }
  }

  Matrix acc(n, m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_band(i, j, n, m, opts)) continue;
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, acc(i - 1, j - 1));
        if (i > 0) best = std::min(best, acc(i - 1, j));
        if (j > 0) best = std::min(best, acc(i, j - 1));
      }
      acc(i, j) = best + c.values(i, j);
    }
  }
  if (!std::isfinite(acc(n - 1, m - 1))) {
    throw Error(Errc::kInvalidArgument, "DTW band leaves no feasible path");
  }

  AlignmentPath path;
  path.total_cost = acc(n - 1, m - 1);
  std::size_t i = n - 1, j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

std::string check_path(const AlignmentPath& p, std::size_t n, std::size_t m) {
  if (p.pairs.empty()) return "path is empty";
  if (p.pairs.front() != std::pair<std::size_t, std::size_t>{0, 0}) return "path does not start at (0,0)";
  if (p.pairs.back() != std::pair<std::size_t, std::size_t>{n - 1, m - 1}) {
    return "path does not end at (N-1,M-1)";
  }
  for (std::size_t k = 1; k < p.pairs.size(); ++k) {
    const auto [pi, pj] = p.pairs[k - 1];
    const auto [ci, cj] = p.pairs[k];
    const bool ok = (ci == pi + 1 && cj == pj) || (ci == pi && cj == pj + 1) ||
                    (ci == pi + 1 && cj == pj + 1);
    if (!ok) return "illegal step at position " + std::to_string(k);
  }
  return {};
}

double path_cost(const AlignmentPath& p, const CostMatrix& c) {
  double total = 0.0;
  for (const auto& [i, j] : p.pairs) total += c.values(i, j);
  return total;
}

CostMatrix cost_matrix_mcc(const FeatureMatrix& src, const FeatureMatrix& tgt) {
  if (src.dim() != tgt.dim()) {
    throw Error(Errc::kShapeError, "MCC dimensions differ: " + std::to_string(src.dim()) + " vs " +
                                       std::to_string(tgt.dim()));
  }
  CostMatrix c{Matrix(src.frames(), tgt.frames())};
  for (std::size_t i = 0; i < src.frames(); ++i) {
    for (std::size_t j = 0; j < tgt.frames(); ++j) {
      c.values(i, j) = frame_mcd(src.data.row(i), tgt.data.row(j));
    }
  }
  return c;
}

CostMatrix cost_matrix_landmarks(const LandmarkSequence& src, const LandmarkSequence& tgt) {
  std::vector<LandmarkFrame> a, b;
  a.reserve(src.size());
  b.reserve(tgt.size());
  for (const auto& f : src) a.push_back(center_landmarks(f));
  for (const auto& f : tgt) b.push_back(center_landmarks(f));
  CostMatrix c{Matrix(a.size(), b.size())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < kLandmarksPerFrame; ++p) {
        const double dx = a[i][p].x - b[j][p].x;
        const double dy = a[i][p].y - b[j][p].y;
        sum += dx * dx + dy * dy;
      }
      c.values(i, j) = std::sqrt(sum);
    }
  }
  return c;
}

FeatureMatrix extract_mcc(const Waveform& w, const FeatureConfig& cfg) {
  return mcc_from_logmel(log_mel_spectrogram(w, cfg.stft, cfg.mel), cfg.mcc);
}

AlignmentPath align_dtw_mcc(const Waveform& el, const Waveform& nl, const FeatureConfig& cfg,
                            const DtwOptions& opts) {
  return dtw(cost_matrix_mcc(extract_mcc(el, cfg), extract_mcc(nl, cfg)), opts);
}

AlignmentPath align_dtw_lip(const LandmarkSequence& el, const LandmarkSequence& nl,
                            const DtwOptions& opts) {
  return expand_video_path(dtw(cost_matrix_landmarks(el, nl), opts));
}

WsolaAlignment align_dtw_wsola(const Waveform& el, const Waveform& nl, const FeatureConfig& cfg,
                               const WsolaConfig& wcfg, const DtwOptions& opts) {
  WsolaAlignment out;
  out.stretched_nl = stretch_to_length(nl, el.size(), wcfg);
  out.path = align_dtw_mcc(el, out.stretched_nl, cfg, opts);
  return out;
}

AlignmentPath expand_video_path(const AlignmentPath& p) {
  AlignmentPath out;
  out.total_cost = p.total_cost;
  out.pairs.reserve(p.pairs.size() * kAcousticFramesPerVideoFrame);
  // running max keeps (1,0)/(0,1) video steps from stepping backwards
  std::size_t a = 0, b = 0;
  for (const auto& [i, j] : p.pairs) {
    for (std::size_t k = 0; k < kAcousticFramesPerVideoFrame; ++k) {
      a = std::max(a, kAcousticFramesPerVideoFrame * i + k);
      b = std::max(b, kAcousticFramesPerVideoFrame * j + k);
      if (out.pairs.empty() || out.pairs.back() != std::pair{a, b}) out.pairs.emplace_back(a, b);
    }
  }
  return out;
}

AlignmentPath clip_path(const AlignmentPath& p, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw Error(Errc::kEmptyInput, "cannot clip a path to an empty grid");
  AlignmentPath out;
  out.total_cost = p.total_cost;
  for (const auto& [i, j] : p.pairs) {
    if (i >= n) continue;
    const std::pair<std::size_t, std::size_t> q{i, std::min(j, m - 1)};
    if (out.pairs.empty() || out.pairs.back() != q) out.pairs.push_back(q);
  }
  return out;
}

Matrix apply_warp(const AlignmentPath& p, const Matrix& tgt) {
  auto pairs = p.pairs;
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [i, j] : pairs) {
    if (j >= tgt.rows()) {
      throw Error(Errc::kIndexOutOfBounds, "path target index " + std::to_string(j) +
                                               " >= " + std::to_string(tgt.rows()) + " frames");
    }
  }
  std::size_t distinct = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (k == 0 || pairs[k].first != pairs[k - 1].first) ++distinct;
  }

  Matrix out(distinct, tgt.cols());
  std::size_t row = 0;
  for (std::size_t k = 0; k < pairs.size();) {
    std::size_t end = k;
    while (end < pairs.size() && pairs[end].first == pairs[k].first) ++end;
    auto dst = out.row(row);
    for (std::size_t q = k; q < end; ++q) {
      const auto src = tgt.row(pairs[q].second);
      for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += src[d];
    }
    const double inv = 1.0 / static_cast<double>(end - k);
    for (double& v : dst) v *= inv;
    ++row;
    k = end;
  }
  return out;
}

}  // namespace elvc
