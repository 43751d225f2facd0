// Copyright 2026 The formstruct Authors.
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

#ifndef FORMSTRUCT_ERROR_HPP_
#define FORMSTRUCT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace formstruct {

enum class ErrorCode {
  kMalformedDocument,
  kUnknownBlockType,
  kInvalidForm,
  kEmptyCorpus,
  kInvalidArgument,
  kInvalidTokenId,
  kMalformedSequence,
  kAnnotationMismatch,
  kContextOverflow,
  kDegenerateRow,
  kShapeMismatch,
  kEmptyLossSupport,
  kEmptyInput,
  kMissingCheckpoint,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All domain failures surface as this exception; `code()` identifies the
// failure class so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code-name prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace formstruct

#endif  // FORMSTRUCT_ERROR_HPP_
