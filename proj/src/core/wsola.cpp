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

#include "wsola.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "dsp.hpp"
#include "error.hpp"

namespace elvc {
namespace {

constexpr double kWindowSumFloor = 1e-8;

// Normalized cross-correlation of two equal-length segments; 0 when either
// segment is silent.
double ncc(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  const double denom = std::sqrt(aa * bb);
  return denom > 0.0 ? ab / denom : 0.0;
}

}  // namespace

void WsolaConfig::validate() const {
  if (frame_len == 0 || frame_len % 2 != 0) {
    throw Error(Errc::kConfigError, "WSOLA frame_len must be positive and even");
  }
  if (synthesis_hop == 0 || synthesis_hop > frame_len) {
    throw Error(Errc::kConfigError, "WSOLA synthesis_hop must lie in (0, frame_len]");
  }
}

Waveform stretch(const Waveform& w, double alpha, const WsolaConfig& cfg) {
  cfg.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::kInvalidArgument, "stretch factor must be positive");
  }
  const std::size_t n = cfg.frame_len;
  const std::size_t hop = cfg.synthesis_hop;
  if (w.size() < n) {
    throw Error(Errc::kInputTooShort, "waveform has " + std::to_string(w.size()) +
                                          " samples, WSOLA needs at least " + std::to_string(n));
  }

  const std::size_t in_len = w.size();
  const auto target = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(in_len)));
  const std::size_t frames = target <= n ? 1 : 2 + (target - n - 1) / hop;
  const std::size_t out_len = (frames - 1) * hop + n;
  const std::size_t last_start = in_len - 1;
  const auto tol = static_cast<long long>(cfg.tolerance);

  const auto window = hann_window(n);
  std::vector<double> acc(out_len, 0.0);
  std::vector<double> wsum(out_len, 0.0);
  std::vector<double> reference(n);
  // zero tail so frames near the end keep their nominal position
  std::vector<double> padded(w.samples);
  padded.resize(in_len + n, 0.0);
  const std::span<const double> x(padded);

  std::size_t prev = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    std::size_t pos = 0;
    if (k > 0) {
      // Natural continuation of the previously copied frame, zero past the end.
      const std::size_t ref_start = prev + hop;
      for (std::size_t i = 0; i < n; ++i) {
        reference[i] = ref_start + i < in_len ? x[ref_start + i] : 0.0;
      }
      const auto nominal = std::llround(static_cast<double>(k * hop) / alpha);
      double best = -2.0;
      // Visit delta = 0, -1, +1, -2, +2, ... so strict improvement keeps the
      // smallest |delta| (negative first) on ties.
      for (long long step = 0; step <= 2 * tol; ++step) {
        const long long delta = step == 0 ? 0 : (step % 2 == 1 ? -(step + 1) / 2 : step / 2);
        const long long cand =
            std::clamp<long long>(nominal + delta, 0, static_cast<long long>(last_start));
        const double score = ncc(x.subspan(static_cast<std::size_t>(cand), n), reference);
        if (score > best) {
          best = score;
          pos = static_cast<std::size_t>(cand);
        }
      }
    }
    const std::size_t out_start = k * hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[out_start + i] += window[i] * x[pos + i];
      wsum[out_start + i] += window[i];
    }
    prev = pos;
  }

  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(target);
  for (std::size_t i = 0; i < target; ++i) {
    out.samples[i] = acc[i] / std::max(wsum[i], kWindowSumFloor);
  }
  return out;
}

Waveform stretch_to_length(const Waveform& w, std::size_t target_samples, const WsolaConfig& cfg) {
  cfg.validate();
  if (target_samples < cfg.frame_len) {
    throw Error(Errc::kInputTooShort, "target length " + std::to_string(target_samples) +
                                          " is shorter than one WSOLA frame");
  }
  if (w.size() < cfg.frame_len) {
    throw Error(Errc::kInputTooShort, "waveform shorter than one WSOLA frame");
  }
  const double alpha = static_cast<double>(target_samples) / static_cast<double>(w.size());
  Waveform out = stretch(w, alpha, cfg);
  out.samples.resize(target_samples, 0.0);
  return out;
}

}  // namespace elvc
