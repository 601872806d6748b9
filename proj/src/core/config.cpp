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

#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "error.hpp"

namespace elvc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw Error(Errc::kConfigError, key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw Error(Errc::kConfigError, key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw Error(Errc::kConfigError, key + ": expected a number, got '" + v + "'");
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"stft.window_len", [](auto& c, auto& k, auto& v) { c.features.stft.window_len = to_size(k, v); }},
      {"stft.hop", [](auto& c, auto& k, auto& v) { c.features.stft.hop = to_size(k, v); }},
      {"stft.fft_size", [](auto& c, auto& k, auto& v) { c.features.stft.fft_size = to_size(k, v); }},
      {"mel.n_mels", [](auto& c, auto& k, auto& v) { c.features.mel.n_mels = to_size(k, v); }},
      {"mel.f_min", [](auto& c, auto& k, auto& v) { c.features.mel.f_min = to_double(k, v); }},
      {"mel.f_max", [](auto& c, auto& k, auto& v) { c.features.mel.f_max = to_double(k, v); }},
      {"mel.log_floor", [](auto& c, auto& k, auto& v) { c.features.mel.log_floor = to_double(k, v); }},
      {"mcc.order", [](auto& c, auto& k, auto& v) { c.features.mcc.order = to_size(k, v); }},
      {"wsola.frame_len", [](auto& c, auto& k, auto& v) { c.wsola.frame_len = to_size(k, v); }},
      {"wsola.synthesis_hop", [](auto& c, auto& k, auto& v) { c.wsola.synthesis_hop = to_size(k, v); }},
      {"wsola.tolerance", [](auto& c, auto& k, auto& v) { c.wsola.tolerance = to_size(k, v); }},
      {"align.band",
       [](auto& c, auto& k, auto& v) {
         const auto b = to_size(k, v);
         c.dtw.band = b == 0 ? std::nullopt : std::optional<std::size_t>(b);
       }},
      {"model.conv_channels", [](auto& c, auto& k, auto& v) { c.model.conv_channels = to_size(k, v); }},
      {"model.kernel", [](auto& c, auto& k, auto& v) { c.model.kernel = to_size(k, v); }},
      {"model.gru_hidden", [](auto& c, auto& k, auto& v) { c.model.gru_hidden = to_size(k, v); }},
      {"train.batch_size", [](auto& c, auto& k, auto& v) { c.train.batch_size = to_size(k, v); }},
      {"train.learning_rate", [](auto& c, auto& k, auto& v) { c.train.learning_rate = to_double(k, v); }},
      {"train.beta1", [](auto& c, auto& k, auto& v) { c.train.beta1 = to_double(k, v); }},
      {"train.beta2", [](auto& c, auto& k, auto& v) { c.train.beta2 = to_double(k, v); }},
      {"train.epsilon", [](auto& c, auto& k, auto& v) { c.train.epsilon = to_double(k, v); }},
      {"train.epochs", [](auto& c, auto& k, auto& v) { c.train.epochs = to_size(k, v); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         c.seed = to_u64(k, v);
         c.train.seed = c.seed;
       }},
      {"jobs", [](auto& c, auto& k, auto& v) { c.jobs = to_size(k, v); }},
      {"paths.manifest", [](auto& c, auto&, auto& v) { c.manifest = v; }},
      {"paths.output", [](auto& c, auto&, auto& v) { c.output = v; }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  features.stft.validate();
  features.mel.validate(kPipelineSampleRate);
  features.mcc.validate(features.mel.n_mels);
  wsola.validate();
  train.validate();
  if (jobs == 0) throw Error(Errc::kConfigError, "jobs: must be at least 1");
  if (model.conv_channels > 0 && model.kernel % 2 == 0) {
    throw Error(Errc::kConfigError, "model.kernel: must be odd");
  }
  if (manifest && !std::filesystem::exists(*manifest)) {
    throw Error(Errc::kConfigError, "paths.manifest: " + manifest->string() + " does not exist");
  }
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(Errc::kConfigError, key + ": unknown key");
  it->second(cfg, key, value);
}

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kConfigError, origin + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(Errc::kConfigError, origin + ":" + std::to_string(line_no) + ": " + e.detail());
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string config_to_text(const PipelineConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "stft.window_len=" << c.features.stft.window_len << "\n"
    << "stft.hop=" << c.features.stft.hop << "\n"
    << "stft.fft_size=" << c.features.stft.fft_size << "\n"
    << "mel.n_mels=" << c.features.mel.n_mels << "\n"
    << "mel.f_min=" << c.features.mel.f_min << "\n"
    << "mel.f_max=" << c.features.mel.f_max << "\n"
    << "mel.log_floor=" << c.features.mel.log_floor << "\n"
    << "mcc.order=" << c.features.mcc.order << "\n"
    << "wsola.frame_len=" << c.wsola.frame_len << "\n"
    << "wsola.synthesis_hop=" << c.wsola.synthesis_hop << "\n"
    << "wsola.tolerance=" << c.wsola.tolerance << "\n"
    << "align.band=" << c.dtw.band.value_or(0) << "\n"
    << "model.conv_channels=" << c.model.conv_channels << "\n"
    << "model.kernel=" << c.model.kernel << "\n"
    << "model.gru_hidden=" << c.model.gru_hidden << "\n"
    << "train.batch_size=" << c.train.batch_size << "\n"
    << "train.learning_rate=" << c.train.learning_rate << "\n"
    << "train.beta1=" << c.train.beta1 << "\n"
    << "train.beta2=" << c.train.beta2 << "\n"
    << "train.epsilon=" << c.train.epsilon << "\n"
    << "train.epochs=" << c.train.epochs << "\n"
    << "seed=" << c.seed << "\n"
    << "jobs=" << c.jobs << "\n";
  if (c.manifest) o << "paths.manifest=" << c.manifest->string() << "\n";
  if (c.output) o << "paths.output=" << c.output->string() << "\n";
  return o.str();
}

}  // namespace elvc
