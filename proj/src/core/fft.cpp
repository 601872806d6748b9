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

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "error.hpp"

namespace elvc {
namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) throw Error(Errc::kInvalidArgument, "FFT size must be positive");
  std::lock_guard lock(planner_mutex());
  in_ = fftw_alloc_real(n);
  auto* out = fftw_alloc_complex(n / 2 + 1);
  out_ = out;
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

void RealFft::magnitude(std::span<const double> input, std::span<double> out) {
  if (input.size() > n_ || out.size() != n_ / 2 + 1) {
    throw Error(Errc::kShapeError, "FFT buffer size mismatch");
  }
  std::copy(input.begin(), input.end(), in_);
  std::fill(in_ + input.size(), in_ + n_, 0.0);
  fftw_execute(static_cast<fftw_plan>(plan_));
  const auto* spec = static_cast<const fftw_complex*>(out_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::hypot(spec[k][0], spec[k][1]);
}

}  // namespace elvc
