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

#include <gtest/gtest.h>

#include "error.hpp"
#include "test_support.hpp"
#include "wsola.hpp"

namespace elvc {
namespace {

Waveform noise(std::size_t n, std::uint64_t seed, double amp = 0.5) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(u(gen));
  return w;
}

TEST(Stretch, UnitRateZeroToleranceIsIdentityInside) {
  const auto w = noise(16000, 1);
  const auto out = stretch(w, 1.0, WsolaConfig{512, 256, 0});
  ASSERT_EQ(out.size(), w.size());
  double worst = 0.0;
  for (std::size_t i = 512; i + 512 < w.size(); ++i) worst = std::max(worst, std::abs(out.samples[i] - w.samples[i]));
  EXPECT_LE(worst, 1e-6);
}

TEST(Stretch, UnitRateWithSearchStillIdentityOnNoise) {
  // natural continuation is the exact match at delta 0
  const auto w = noise(8000, 2);
  const auto out = stretch(w, 1.0);
  double worst = 0.0;
  for (std::size_t i = 512; i + 512 < w.size(); ++i) worst = std::max(worst, std::abs(out.samples[i] - w.samples[i]));
  EXPECT_LE(worst, 1e-6);
}

TEST(Stretch, LengthContract) {
  const auto w = noise(16000, 3);
  for (double alpha : {0.5, 0.7, 1.0, 1.3, 1.5, 2.0}) {
    const auto out = stretch(w, alpha);
    EXPECT_LE(std::abs(static_cast<double>(out.size()) - alpha * 16000.0), 256.0) << alpha;
  }
  EXPECT_LE(std::abs(static_cast<double>(stretch(w, 2.0).size()) - 32000.0), 256.0);
}

TEST(Stretch, PitchPreserved) {
  for (double hz : {110.0, 440.0, 1000.0}) {
    const Waveform w{testing::sine(hz, 16000), 16000};
    for (double alpha : {0.5, 1.5, 2.0}) {
      const auto out = stretch(w, alpha);
      const std::size_t start = (out.size() - 4096) / 2;
      const auto bin = testing::dft_peak_bin(out.samples, start, 4096);
      const double expected = hz * 4096.0 / 16000.0;
      EXPECT_LE(std::abs(static_cast<double>(bin) - expected), 1.0 + 1e-9) << hz << " Hz, alpha " << alpha;
    }
  }
}

TEST(Stretch, AmplitudeBounded) {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const auto w = noise(12000, seed);
    double in_max = 0.0;
    for (double s : w.samples) in_max = std::max(in_max, std::abs(s));
    for (double alpha : {0.5, 1.3, 2.0}) {
      const auto out = stretch(w, alpha);
      for (double s : out.samples) ASSERT_LE(std::abs(s), in_max * 1.1);
    }
  }
}

TEST(Stretch, Deterministic) {
  const auto w = noise(9000, 7);
  EXPECT_EQ(stretch(w, 1.37).samples, stretch(w, 1.37).samples);
}

TEST(Stretch, Errors) {
  const auto w = noise(511, 8);
  try {
    stretch(w, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInputTooShort);
  }
  const auto ok = noise(2000, 8);
  EXPECT_THROW(stretch(ok, 0.0), Error);
  EXPECT_THROW(stretch(ok, -1.0), Error);
  EXPECT_THROW(stretch(ok, 1.0, WsolaConfig{511, 256, 0}), Error);
  EXPECT_THROW(stretch(ok, 1.0, WsolaConfig{512, 0, 0}), Error);
  EXPECT_THROW(stretch(ok, 1.0, WsolaConfig{512, 513, 0}), Error);
}

TEST(StretchToLength, ExactLength) {
  const auto w = noise(16000, 9);
  EXPECT_EQ(stretch_to_length(w, 20800).size(), 20800u);
  EXPECT_EQ(stretch_to_length(w, 9001).size(), 9001u);
  const auto same = stretch_to_length(w, 16000, WsolaConfig{512, 256, 0});
  ASSERT_EQ(same.size(), 16000u);
  for (std::size_t i = 512; i + 512 < w.size(); ++i) ASSERT_NEAR(same.samples[i], w.samples[i], 1e-6);
}

TEST(StretchToLength, PitchKeptOverRatios) {
  const Waveform w{testing::sine(300.0, 12000), 16000};
  for (double ratio : {0.5, 0.8, 1.3, 2.0}) {
    const auto out = stretch_to_length(w, static_cast<std::size_t>(ratio * 12000));
    const std::size_t start = (out.size() - 4096) / 2;
    const auto bin = testing::dft_peak_bin(out.samples, start, 4096);
    EXPECT_LE(std::abs(static_cast<double>(bin) - 300.0 * 4096.0 / 16000.0), 1.0) << ratio;
  }
}

TEST(StretchToLength, TargetTooShort) {
  try {
    stretch_to_length(noise(4000, 10), 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInputTooShort);
  }
}

}  // namespace
}  // namespace elvc
