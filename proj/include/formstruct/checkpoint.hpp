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

#ifndef FORMSTRUCT_CHECKPOINT_HPP_
#define FORMSTRUCT_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "formstruct/model.hpp"
#include "formstruct/tokenizer.hpp"

namespace formstruct {

struct NamedTensor {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<float> data;  // row-major

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

// On-disk model state. See docs/checkpoint_format.md for the byte layout.
struct Checkpoint {
  ModelConfig config;
  Vocab vocab;
  std::int64_t step = 0;
  // Free-form key=value pairs (e.g. the fine-tuned task).
  std::map<std::string, std::string> metadata;
  std::vector<NamedTensor> tensors;
};

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
// Throws MissingCheckpoint when the file does not exist and
// MalformedDocument when it cannot be parsed.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

template <typename T>
Checkpoint MakeCheckpoint(const Seq2SeqModel<T>& model, const Vocab& vocab, std::int64_t step);

// Copies tensors into a model of matching configuration; every parameter
// must be present with the same shape.
template <typename T>
void LoadParameters(Seq2SeqModel<T>& model, const Checkpoint& checkpoint);

}  // namespace formstruct

#endif  // FORMSTRUCT_CHECKPOINT_HPP_
