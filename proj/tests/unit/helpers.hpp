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

#ifndef FORMSTRUCT_TESTS_HELPERS_HPP_
#define FORMSTRUCT_TESTS_HELPERS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "formstruct/corpus.hpp"
#include "formstruct/form.hpp"
#include "formstruct/model.hpp"
#include "formstruct/tokenizer.hpp"

namespace testing {

using namespace formstruct;

// One block of every type, canonical spelling.
inline Form KitchenSinkForm() {
  Form f;
  f.title = "club sign - up";
  f.description = "tell us about yourself .";
  f.blocks.push_back({BlockType::kDescription, "welcome to the club", std::nullopt, {}, {}, {}});
  f.blocks.push_back({BlockType::kTextField, "your name", std::nullopt, {}, {}, {}});
  f.blocks.push_back({BlockType::kChoice, "which day works ?", std::string("pick one"),
                      {"monday", "tuesday", "friday"}, {}, {}});
  f.blocks.push_back({BlockType::kDate, "date of birth", std::nullopt, {}, {}, {}});
  f.blocks.push_back({BlockType::kTime, "preferred time", std::nullopt, {}, {}, {}});
  f.blocks.push_back({BlockType::kLikert, "rate these statements", std::nullopt, {},
                      {"the club is fun", "meetings are useful"}, {"disagree", "neutral", "agree"}});
  f.blocks.push_back({BlockType::kRating, "overall rating", std::nullopt, {"1", "2", "3", "4", "5"}, {}, {}});
  f.blocks.push_back({BlockType::kUpload, "upload a photo", std::nullopt, {}, {}, {}});
  return f;
}

inline std::vector<FormRecord> Synthetic(int n, std::uint64_t seed) {
  return GenerateSyntheticCorpus(DefaultSyntheticSpec(n, seed));
}

inline Vocab VocabFor(const std::vector<FormRecord>& records) {
  std::vector<Form> forms;
  for (const auto& r : records) forms.push_back(r.form);
  return Vocab::Build(CollectTexts(forms), 1);
}

inline Vocab VocabFor(const Form& form) { return Vocab::Build(CollectTexts(std::vector<Form>{form}), 1); }

inline ModelConfig TinyConfig(int vocab_size) {
  ModelConfig c;
  c.d_model = 8;
  c.n_heads = 2;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.ffn_dim = 16;
  c.dropout = 0.0;
  c.max_source_len = 128;
  c.max_target_len = 16;
  c.vocab_size = vocab_size;
  return c;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("formstruct-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

#endif  // FORMSTRUCT_TESTS_HELPERS_HPP_
