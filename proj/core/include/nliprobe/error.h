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

#ifndef NLIPROBE_ERROR_H_
#define NLIPROBE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace nliprobe {

// Error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  kUsage = 2,
  kParse = 3,
  kProtocol = 4,
  kValidation = 5,
  kTransport = 6,
  kLookup = 7,
  kEmptyInput = 8,
  kIo = 9,
  kNumeric = 10,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace nliprobe

#endif  // NLIPROBE_ERROR_H_
