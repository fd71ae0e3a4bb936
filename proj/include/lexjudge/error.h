// Copyright 2026 The Lexjudge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEXJUDGE_ERROR_H_
#define LEXJUDGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexjudge {

enum class ErrorCode {
  kValidation,
  kConflict,
  kQuota,
  kProtocol,
  kNotFound,
  kIo,
  kUnauthorized,
  kPrediction,
  kInternal,
};

// Stable wire name, e.g. "validation".
std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as Error. `field` names the offending
// field or invariant when there is one; `line` is the 1-based input line for
// file ingestion errors (0 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {},
        int line = 0)
      : std::runtime_error(std::move(message)),
        code_(code),
        field_(std::move(field)),
        line_(line) {}

  ErrorCode code() const { return code_; }
  const std::string &field() const { return field_; }
  int line() const { return line_; }

 private:
  ErrorCode code_;
  std::string field_;
  int line_;
};

inline Error ValidationError(std::string message, std::string field = {}) {
  return Error(ErrorCode::kValidation, std::move(message), std::move(field));
}

}  // namespace lexjudge

#endif  // LEXJUDGE_ERROR_H_
