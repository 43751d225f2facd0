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

#ifndef FORMSTRUCT_CONFIG_HPP_
#define FORMSTRUCT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "formstruct/model.hpp"
#include "formstruct/serializer.hpp"
#include "formstruct/task.hpp"
#include "formstruct/train.hpp"

namespace formstruct {

// Every knob of a pipeline run. Stored as flat `key=value` lines; see
// RunConfig::Keys() for the list and docs/config.md for meanings.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out = "run";
  std::string corpus = "corpus";
  std::string checkpoint;
  Task task = Task::kQuestionRec;

  // corpus generation / splitting
  int n_forms = 1000;
  double train_ratio = 0.8;
  double validation_ratio = 0.1;
  double test_ratio = 0.1;
  int vocab_min_freq = 1;
  int vocab_max_size = 16384;
  int cap_per_form = 5;

  // model
  int d_model = 128;
  int n_heads = 4;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int ffn_dim = 512;
  double dropout = 0.1;
  int max_source_len = 512;
  int max_target_len = 64;
  AttentionVariant variant = AttentionVariant::kHybrid;
  bool encoder_struct = true;
  bool decoder_struct = true;
  bool per_head_bias = false;

  // serialization
  bool plain_serialization = false;
  bool type_tokens = true;
  ContextMode context = ContextMode::kFull;

  // optimization
  double learning_rate = 5e-5;
  double weight_decay = 0.0;
  double clip_norm = 1.0;
  int batch_size = 32;
  int pretrain_steps = 15000;
  double mask_budget = 0.15;
  int epochs = 5;
  int beam = 5;

  // ablation
  std::string ablate_grid = "removals";  // removals | variants | all
  std::string ablate_seeds = "1,2,3";

  static const std::vector<std::string>& Keys();
  // Throws InvalidArgument for unknown keys or unparsable values.
  void Set(std::string_view key, std::string_view value);
  std::string Get(std::string_view key) const;

  // `key=value` per line in Keys() order; '#' starts a comment on input.
  std::string ToText() const;
  static RunConfig FromText(std::string_view text);
  static RunConfig Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;
  // 16 hex digits (FNV-1a over ToText()).
  std::string Hash() const;

  ModelConfig ToModelConfig(int vocab_size) const;
  SerializeOptions ToSerializeOptions() const;
  OptimOptions ToOptimOptions() const;
  EvalOptions ToEvalOptions() const;
  std::vector<std::uint64_t> AblationSeeds() const;
};

}  // namespace formstruct

#endif  // FORMSTRUCT_CONFIG_HPP_
