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

#include "error.hpp"

namespace elvc {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kNotFound: return "NotFound";
    case Errc::kUnsupportedFormat: return "UnsupportedFormat";
    case Errc::kBadSampleRate: return "BadSampleRate";
    case Errc::kIoError: return "IoError";
    case Errc::kParseError: return "ParseError";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kTruncatedFile: return "TruncatedFile";
    case Errc::kShapeError: return "ShapeError";
    case Errc::kInputTooShort: return "InputTooShort";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kIndexOutOfBounds: return "IndexOutOfBounds";
    case Errc::kBadDim: return "BadDim";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kModeMismatch: return "ModeMismatch";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace elvc
