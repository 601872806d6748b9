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

#include <stdexcept>
#include <string>

namespace elvc {

// Error kinds surfaced by every module. The C API maps these one-to-one onto
// elvc_status values, so the order here is part of the ABI.
enum class Errc {
  kNotFound = 1,
  kUnsupportedFormat,
  kBadSampleRate,
  kIoError,
  kParseError,
  kBadMagic,
  kTruncatedFile,
  kShapeError,
  kInputTooShort,
  kEmptyInput,
  kIndexOutOfBounds,
  kBadDim,
  kEmptyDataset,
  kModeMismatch,
  kConfigError,
  kInvalidArgument,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const noexcept { return code_; }
  // message without the leading error name
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace elvc
