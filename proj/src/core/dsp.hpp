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

struct StftConfig {
  std::size_t window_len = 512;
  std::size_t hop = 160;
  std::size_t fft_size = 512;

  void validate() const;
};

struct MelConfig {
  std::size_t n_mels = 80;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;

  void validate(int sample_rate) const;
};

struct MccConfig {
  std::size_t order = 25;  // includes c0

  void validate(std::size_t n_mels) const;
};

// Periodic Hann window, w[n] = 0.5 - 0.5 cos(2 pi n / len).
std::vector<double> hann_window(std::size_t len);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Frame count for a signal of `len` samples.
std::size_t frame_count(std::size_t len, const StftConfig& cfg);

// T x window_len matrix of (unwindowed) frames; frame t starts at t*hop and
// short input is zero-padded on the right.
Matrix frame_signal(const Waveform& w, const StftConfig& cfg);

// Triangular filterbank, n_mels x (fft_size/2 + 1). Peak of filter m is 1 at
// centers[m], edges at the neighbouring mel-spaced points.
class MelFilterbank {
 public:
  MelFilterbank(const MelConfig& cfg, std::size_t fft_size, int sample_rate);

  const Matrix& weights() const noexcept { return weights_; }
  const std::vector<double>& center_hz() const noexcept { return centers_; }

  void apply(std::span<const double> magnitude, std::span<double> out) const;

 private:
  Matrix weights_;
  std::vector<double> centers_;
  std::vector<std::size_t> first_bin_;
  std::vector<std::size_t> last_bin_;
};

FeatureMatrix log_mel_spectrogram(const Waveform& w, const StftConfig& scfg = {},
                                  const MelConfig& mcfg = {});

// Orthonormal DCT-II basis, n x n, row k = basis function k.
Matrix dct2_orthonormal(std::size_t n);

FeatureMatrix mcc_from_logmel(const FeatureMatrix& lms, const MccConfig& cfg = {});

// Mel-cepstral distortion in dB over coefficients 1..D-1 (c0 excluded).
double frame_mcd(std::span<const double> a, std::span<const double> b);

// (10 / ln 10) * sqrt(2)
inline constexpr double kMcdScale = 6.141851463713754;

}  // namespace elvc
