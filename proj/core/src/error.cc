// Copyright 2026 The nliprobe Authors.
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

#include "nliprobe/error.h"

namespace nliprobe {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return "usage";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kProtocol:
      return "protocol";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kTransport:
      return "transport";
    case ErrorCode::kLookup:
      return "lookup";
    case ErrorCode::kEmptyInput:
      return "empty-input";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kNumeric:
      return "numeric";
  }
  return "unknown";
}

}  // namespace nliprobe
