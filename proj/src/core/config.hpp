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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "align.hpp"
#include "model.hpp"
#include "train.hpp"

namespace elvc {

// Every pipeline knob, loaded from flat "section.key = value" text. Unknown
// keys and malformed values are rejected with the offending key path.
struct PipelineConfig {
  FeatureConfig features;
  WsolaConfig wsola;
  DtwOptions dtw;
  ModelConfig model;  // mode and visual shape are set per command
  TrainConfig train;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> output;

  void validate() const;
};

PipelineConfig parse_config(const std::string& text, const std::string& origin = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

// Applies one "key=value" override on top of an existing config.
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

std::string config_to_text(const PipelineConfig& cfg);

}  // namespace elvc
