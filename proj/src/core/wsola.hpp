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

#include "audio_io.hpp"

namespace elvc {

struct WsolaConfig {
  std::size_t frame_len = 512;
  std::size_t synthesis_hop = 256;
  std::size_t tolerance = 256;

  void validate() const;
};

// Time-scale modification by waveform-similarity overlap-add. The result has
// round(alpha * len(w)) samples and keeps the pitch of the input.
Waveform stretch(const Waveform& w, double alpha, const WsolaConfig& cfg = {});

// Stretch so the result has exactly `target_samples` samples.
Waveform stretch_to_length(const Waveform& w, std::size_t target_samples,
                           const WsolaConfig& cfg = {});

}  // namespace elvc
