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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace elvc {

// Real-input forward DFT of a fixed size, backed by FFTW. Instances may be
// used from one thread at a time; construction is safe from any thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }

  // Magnitudes of bins 0..n/2 of the zero-padded input (input.size() <= n).
  void magnitude(std::span<const double> input, std::span<double> out);

 private:
  std::size_t n_;
  double* in_;
  void* out_;
  void* plan_;
};

}  // namespace elvc
