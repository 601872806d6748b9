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

#include "audio_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace elvc {
namespace {

namespace fs = std::filesystem;

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr char kElfMagic[4] = {'E', 'L', 'F', '1'};

template <typename T>
T load_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

template <typename T>
void store_le(std::string& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

std::string slurp(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(Errc::kNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void spill(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

std::string printable(std::string_view tok) {
  std::string out;
  for (const char c : tok.substr(0, 24)) out += std::isprint(static_cast<unsigned char>(c)) ? c : '?';
  if (tok.size() > 24) out += "...";
  return out;
}

double parse_double(std::string_view tok, const fs::path& path, std::size_t line) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) {
    tok.remove_suffix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw Error(Errc::kParseError, path.string() + ":" + std::to_string(line) +
                                       ": not a number: '" + printable(tok) + "'");
  }
  return v;
}

}  // namespace

void FeatureMatrix::validate() const {
  if (data.rows() == 0 || data.cols() == 0) throw Error(Errc::kShapeError, "empty feature matrix");
  if (!data.all_finite()) throw Error(Errc::kShapeError, "feature matrix has non-finite entries");
  if (kind == FeatureKind::kLms && data.cols() != kLmsDim) {
    throw Error(Errc::kShapeError,
                "LMS features must be 80-dimensional, got " + std::to_string(data.cols()));
  }
}

void LayeredFeatureSet::validate() const {
  if (layers.empty()) throw Error(Errc::kShapeError, "feature set has no layers");
  const auto t = layers.front().rows();
  const auto d = layers.front().cols();
  if (t == 0 || d == 0) throw Error(Errc::kShapeError, "feature set has an empty layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].rows() != t || layers[l].cols() != d) {
      throw Error(Errc::kShapeError, "layer " + std::to_string(l) + " is " +
                                         std::to_string(layers[l].rows()) + "x" +
                                         std::to_string(layers[l].cols()) + ", expected " +
                                         std::to_string(t) + "x" + std::to_string(d));
    }
  }
}

Waveform read_wav(const fs::path& path) {
  const std::string bytes = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw Error(Errc::kUnsupportedFormat, path.string() + " is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const auto chunk_size = load_le<std::uint32_t>(p + pos + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > n - body) {
      throw Error(Errc::kUnsupportedFormat, path.string() + ": chunk overruns file");
    }
    if (std::memcmp(p + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw Error(Errc::kUnsupportedFormat, path.string() + ": short fmt chunk");
      format = load_le<std::uint16_t>(p + body);
      channels = load_le<std::uint16_t>(p + body + 2);
      rate = load_le<std::uint32_t>(p + body + 4);
      bits = load_le<std::uint16_t>(p + body + 14);
      if (format == kFormatExtensible && chunk_size >= 26) {
        format = load_le<std::uint16_t>(p + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(p + pos, "data", 4) == 0) {
      pcm = p + body;
      pcm_bytes = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!have_fmt || pcm == nullptr) {
    throw Error(Errc::kUnsupportedFormat, path.string() + ": missing fmt or data chunk");
  }
  if (format != kFormatPcm) throw Error(Errc::kUnsupportedFormat, path.string() + ": not PCM");
  if (channels != 1) {
    throw Error(Errc::kUnsupportedFormat,
                path.string() + ": " + std::to_string(channels) + " channels, expected mono");
  }
  if (bits != 16) {
    throw Error(Errc::kUnsupportedFormat,
                path.string() + ": " + std::to_string(bits) + "-bit samples, expected 16");
  }
  if (rate != static_cast<std::uint32_t>(kPipelineSampleRate)) {
    throw Error(Errc::kBadSampleRate, path.string() + ": " + std::to_string(rate) + " Hz");
  }

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(pcm_bytes / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = load_le<std::int16_t>(pcm + 2 * i) / 32768.0;
  }
  return w;
}

std::int16_t quantize_pcm16(double amplitude) noexcept {
  constexpr double kMax = 1.0 - 1.0 / 32768.0;
  const double clipped = std::clamp(amplitude, -1.0, kMax);
  return static_cast<std::int16_t>(std::lround(clipped * 32768.0));
}

void write_wav(const Waveform& w, const fs::path& path) {
  if (!std::all_of(w.samples.begin(), w.samples.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(Errc::kInvalidArgument, "waveform has non-finite samples");
  }
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  store_le<std::uint32_t>(out, 36 + data_bytes);
  out.append("WAVEfmt ");
  store_le<std::uint32_t>(out, 16);
  store_le<std::uint16_t>(out, kFormatPcm);
  store_le<std::uint16_t>(out, 1);
  store_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate));
  store_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  store_le<std::uint16_t>(out, 2);
  store_le<std::uint16_t>(out, 16);
  out.append("data");
  store_le<std::uint32_t>(out, data_bytes);
  for (double s : w.samples) store_le<std::int16_t>(out, quantize_pcm16(s));
  spill(path, out);
}

LandmarkSequence read_landmarks(const fs::path& path) {
  const std::string text = slurp(path);
  LandmarkSequence seq;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> values;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(rest.substr(0, comma), path, line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (values.size() != 2 * kLandmarksPerFrame) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(line_no) + ": " +
                                         std::to_string(values.size()) + " columns, expected 40");
    }
    LandmarkFrame frame;
    for (std::size_t p = 0; p < kLandmarksPerFrame; ++p) frame[p] = {values[2 * p], values[2 * p + 1]};
    seq.push_back(frame);
  }
  if (seq.empty()) throw Error(Errc::kEmptyInput, path.string() + ": no landmark frames");
  return seq;
}

void write_landmarks(const LandmarkSequence& seq, const fs::path& path) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& frame : seq) {
    for (std::size_t p = 0; p < kLandmarksPerFrame; ++p) {
      if (p) out << ',';
      out << frame[p].x << ',' << frame[p].y;
    }
    out << '\n';
  }
  spill(path, out.str());
}

LayeredFeatureSet read_feature_file(const fs::path& path) {
  const std::string bytes = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 4) throw Error(Errc::kTruncatedFile, path.string() + ": no header");
  if (std::memcmp(p, kElfMagic, 4) != 0) throw Error(Errc::kBadMagic, path.string());
  if (bytes.size() < 16) throw Error(Errc::kTruncatedFile, path.string() + ": short header");
  const std::uint64_t l = load_le<std::uint32_t>(p + 4);
  const std::uint64_t t = load_le<std::uint32_t>(p + 8);
  const std::uint64_t d = load_le<std::uint32_t>(p + 12);
  const std::uint64_t count = l * t * d;
  const std::uint64_t need = 16 + 8 * count;
  if (bytes.size() < need) {
    throw Error(Errc::kTruncatedFile, path.string() + ": " + std::to_string(bytes.size()) +
                                          " bytes, header requires " + std::to_string(need));
  }
  if (bytes.size() > need) throw Error(Errc::kParseError, path.string() + ": trailing bytes");

  LayeredFeatureSet set;
  set.layers.reserve(l);
  const unsigned char* q = p + 16;
  for (std::uint64_t li = 0; li < l; ++li) {
    Matrix m(t, d);
    for (auto& v : m.data()) {
      v = load_le<double>(q);
      q += 8;
    }
    set.layers.push_back(std::move(m));
  }
  set.validate();
  return set;
}

void write_feature_file(const LayeredFeatureSet& set, const fs::path& path) {
  set.validate();
  std::string out;
  out.reserve(16 + 8 * set.num_layers() * set.frames() * set.dim());
  out.append(kElfMagic, 4);
  store_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.num_layers()));
  store_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.frames()));
  store_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  for (const auto& layer : set.layers) {
    for (double v : layer.data()) store_le<double>(out, v);
  }
  spill(path, out);
}

Matrix read_matrix_file(const fs::path& path) {
  auto set = read_feature_file(path);
  if (set.num_layers() != 1) {
    throw Error(Errc::kShapeError, path.string() + ": expected 1 layer, found " +
                                       std::to_string(set.num_layers()));
  }
  return std::move(set.layers.front());
}

void write_matrix_file(const Matrix& m, const fs::path& path) {
  LayeredFeatureSet set;
  set.layers.push_back(m);
  write_feature_file(set, path);
}

}  // namespace elvc
