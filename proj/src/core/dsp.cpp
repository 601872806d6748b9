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

#include "dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "fft.hpp"

namespace elvc {

void StftConfig::validate() const {
  if (hop == 0 || window_len == 0 || fft_size == 0 || hop > window_len || window_len > fft_size) {
    throw Error(Errc::kConfigError, "STFT config requires 0 < hop <= window_len <= fft_size");
  }
}

void MelConfig::validate(int sample_rate) const {
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw Error(Errc::kConfigError, "mel config requires 0 <= f_min < f_max <= sample_rate/2");
  }
  if (n_mels < 2) throw Error(Errc::kConfigError, "mel config requires n_mels >= 2");
  if (!(log_floor > 0.0)) throw Error(Errc::kConfigError, "mel config requires log_floor > 0");
}

void MccConfig::validate(std::size_t n_mels) const {
  if (order < 2 || order > n_mels) {
    throw Error(Errc::kConfigError, "MCC order must lie in [2, " + std::to_string(n_mels) + "]");
  }
}

std::vector<double> hann_window(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t n = 0; n < len; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(len));
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t frame_count(std::size_t len, const StftConfig& cfg) {
  if (len <= cfg.window_len) return 1;
  return 1 + (len - cfg.window_len) / cfg.hop;
}

Matrix frame_signal(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.samples.empty()) throw Error(Errc::kEmptyInput, "cannot frame an empty waveform");
  const std::size_t frames = frame_count(w.size(), cfg);
  Matrix out(frames, cfg.window_len);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * cfg.hop;
    const std::size_t stop = std::min(start + cfg.window_len, w.size());
    std::copy(w.samples.begin() + start, w.samples.begin() + stop, out.row(t).begin());
  }
  return out;
}

MelFilterbank::MelFilterbank(const MelConfig& cfg, std::size_t fft_size, int sample_rate) {
  cfg.validate(sample_rate);
  const std::size_t bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(cfg.f_max);
  std::vector<double> edges(cfg.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(cfg.n_mels + 1));
  }

  weights_ = Matrix(cfg.n_mels, bins);
  centers_.resize(cfg.n_mels);
  first_bin_.assign(cfg.n_mels, bins);
  last_bin_.assign(cfg.n_mels, 0);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    centers_[m] = center;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      const double w = std::max(0.0, std::min((f - left) / (center - left), (right - f) / (right - center)));
      if (w > 0.0) {
        weights_(m, k) = w;
        first_bin_[m] = std::min(first_bin_[m], k);
        last_bin_[m] = k + 1;
      }
    }
    if (first_bin_[m] == bins) first_bin_[m] = 0;
  }
}

void MelFilterbank::apply(std::span<const double> magnitude, std::span<double> out) const {
  for (std::size_t m = 0; m < weights_.rows(); ++m) {
    double acc = 0.0;
    for (std::size_t k = first_bin_[m]; k < last_bin_[m]; ++k) acc += weights_(m, k) * magnitude[k];
    out[m] = acc;
  }
}

FeatureMatrix log_mel_spectrogram(const Waveform& w, const StftConfig& scfg, const MelConfig& mcfg) {
  scfg.validate();
  const MelFilterbank bank(mcfg, scfg.fft_size, w.sample_rate);
  const Matrix frames = frame_signal(w, scfg);
  const auto window = hann_window(scfg.window_len);
  RealFft fft(scfg.fft_size);

  FeatureMatrix out;
  out.data = Matrix(frames.rows(), mcfg.n_mels);
  out.frame_shift_s = static_cast<double>(scfg.hop) / w.sample_rate;
  out.kind = mcfg.n_mels == kLmsDim ? FeatureKind::kLms : FeatureKind::kOther;

  std::vector<double> windowed(scfg.window_len);
  std::vector<double> mag(scfg.fft_size / 2 + 1);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const auto frame = frames.row(t);
    for (std::size_t n = 0; n < windowed.size(); ++n) windowed[n] = frame[n] * window[n];
    fft.magnitude(windowed, mag);
    auto row = out.data.row(t);
    bank.apply(mag, row);
    for (double& v : row) v = std::log(std::max(v, mcfg.log_floor));
  }
  return out;
}

Matrix dct2_orthonormal(std::size_t n) {
  Matrix basis(n, n);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    for (std::size_t i = 0; i < n; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                     (2.0 * static_cast<double>(i) + 1.0) / (2.0 * dn));
    }
  }
  return basis;
}

FeatureMatrix mcc_from_logmel(const FeatureMatrix& lms, const MccConfig& cfg) {
  if (lms.dim() != kLmsDim) {
    throw Error(Errc::kShapeError,
                "MCC extraction expects 80 log-mel bins, got " + std::to_string(lms.dim()));
  }
  cfg.validate(lms.dim());
  const Matrix basis = dct2_orthonormal(lms.dim());
  FeatureMatrix out;
  out.data = Matrix(lms.frames(), cfg.order);
  out.frame_shift_s = lms.frame_shift_s;
  out.kind = FeatureKind::kMcc;
  for (std::size_t t = 0; t < lms.frames(); ++t) {
    const auto in = lms.data.row(t);
    for (std::size_t k = 0; k < cfg.order; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in.size(); ++i) acc += basis(k, i) * in[i];
      out.data(t, k) = acc;
    }
  }
  return out;
}

double frame_mcd(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(Errc::kShapeError, "MCD frames differ in dimension (" + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t d = 1; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return (10.0 / std::numbers::ln10) * std::sqrt(2.0 * sum);
}

}  // namespace elvc
