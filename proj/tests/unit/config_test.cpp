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

#include <fstream>

#include "config.hpp"
#include "error.hpp"
#include "test_support.hpp"

namespace elvc {
namespace {

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config("");
  EXPECT_EQ(c.features.stft.hop, 160u);
  EXPECT_EQ(c.features.mel.n_mels, 80u);
  EXPECT_EQ(c.wsola.tolerance, 256u);
  EXPECT_EQ(c.train.batch_size, 16u);
  EXPECT_DOUBLE_EQ(c.train.learning_rate, 0.0005);
  EXPECT_FALSE(c.dtw.band.has_value());

  const auto d = parse_config(
      "# comment\n"
      "stft.hop = 128   # trailing\n"
      "\n"
      "wsola.tolerance=0\n"
      "align.band=12\n"
      "train.learning_rate=1e-3\n"
      "seed=42\n"
      "jobs=3\n");
  EXPECT_EQ(d.features.stft.hop, 128u);
  EXPECT_EQ(d.wsola.tolerance, 0u);
  EXPECT_EQ(d.dtw.band, std::optional<std::size_t>(12));
  EXPECT_DOUBLE_EQ(d.train.learning_rate, 1e-3);
  EXPECT_EQ(d.seed, 42u);
  EXPECT_EQ(d.jobs, 3u);
  EXPECT_FALSE(parse_config("align.band=0").dtw.band.has_value());
}

TEST(Config, ErrorsCarryKeyAndLine) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "exp.cfg");
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kConfigError);
      return std::string(e.what());
    }
    ADD_FAILURE() << "accepted: " << text;
    return std::string();
  };
  EXPECT_NE(message("stft.hop=160\nstft.hopp=3\n").find("exp.cfg:2: stft.hopp"), std::string::npos);
  EXPECT_NE(message("train.epochs=ten").find("train.epochs"), std::string::npos);
  EXPECT_NE(message("no equals sign").find("exp.cfg:1"), std::string::npos);
  EXPECT_NE(message("stft.hop=1000").find("hop"), std::string::npos);
  message("jobs=0");
  message("model.kernel=4");
  message("train.beta2=1.5");
  message("mcc.order=100");
  message("paths.manifest=/definitely/not/here.csv");
  EXPECT_EQ(message("stft.hopp=3").find("ConfigError: ConfigError"), std::string::npos);
}

TEST(Config, TextRoundTrip) {
  auto c = parse_config("stft.hop=100\nmel.f_max=7600.5\ntrain.epochs=3\nseed=9\nalign.band=4\n");
  const auto back = parse_config(config_to_text(c));
  EXPECT_EQ(config_to_text(back), config_to_text(c));
  EXPECT_EQ(back.features.mel.f_max, 7600.5);
}

TEST(Config, LoadFromFile) {
  testing::TempDir dir("cfg");
  std::ofstream(dir / "a.cfg") << "mcc.order=13\n";
  EXPECT_EQ(load_config(dir / "a.cfg").features.mcc.order, 13u);
  try {
    load_config(dir / "nope.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotFound);
  }
}

}  // namespace
}  // namespace elvc
