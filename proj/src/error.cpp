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

#include "formstruct/error.hpp"

namespace formstruct {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kUnknownBlockType: return "UnknownBlockType";
    case ErrorCode::kInvalidForm: return "InvalidForm";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidTokenId: return "InvalidTokenId";
    case ErrorCode::kMalformedSequence: return "MalformedSequence";
    case ErrorCode::kAnnotationMismatch: return "AnnotationMismatch";
    case ErrorCode::kContextOverflow: return "ContextOverflow";
    case ErrorCode::kDegenerateRow: return "DegenerateRow";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyLossSupport: return "EmptyLossSupport";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMissingCheckpoint: return "MissingCheckpoint";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace formstruct
