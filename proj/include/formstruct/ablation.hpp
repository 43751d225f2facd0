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

#ifndef FORMSTRUCT_ABLATION_HPP_
#define FORMSTRUCT_ABLATION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formstruct/checkpoint.hpp"
#include "formstruct/config.hpp"
#include "formstruct/corpus.hpp"

namespace formstruct {

// One row of an ablation table: the settings it changes relative to the
// base configuration.
struct AblationRow {
  std::string name;
  AttentionVariant variant = AttentionVariant::kHybrid;
  bool encoder_struct = true;
  bool decoder_struct = true;
  bool plain_serialization = false;
  bool type_tokens = true;
  ContextMode context = ContextMode::kFull;

  void ApplyTo(RunConfig& config) const;
};

// Sequential removals (each row keeps the previous removals): full model,
// - decoder struct attention, - encoder struct attention, - form
// serialization, - previous context. A final row replaces the block type
// tokens of the full model with a placeholder.
std::vector<AblationRow> RemovalRows(const RunConfig& base);
// Full model under each attention variant.
std::vector<AblationRow> VariantRows(const RunConfig& base);
// Rows selected by base.ablate_grid.
std::vector<AblationRow> GridRows(const RunConfig& base);

struct AblationData {
  std::vector<FormRecord> train;
  std::vector<FormRecord> validation;
  std::vector<FormRecord> test;
  Vocab vocab;
  std::optional<Checkpoint> pretrained;  // fine-tuning starts here when set
};

struct AblationCellResult {
  std::string row;
  std::map<std::string, std::vector<double>> metrics;  // one value per seed
};

struct AblationTable {
  Task task = Task::kQuestionRec;
  std::vector<std::uint64_t> seeds;
  std::vector<AblationCellResult> rows;

  double Mean(std::size_t row, const std::string& metric) const;
  // Sample standard deviation (n - 1); zero for a single seed.
  double StdDev(std::size_t row, const std::string& metric) const;
  // Markdown table with "mean ± std" cells.
  std::string ToMarkdown() const;
  std::string ToJson() const;
};

using AblationProgress = std::function<void(const std::string& row, std::uint64_t seed,
                                            const EvalResult& result)>;

// Trains and evaluates every row under every seed: rows x seeds runs. Each
// run samples task instances, builds a fresh model (or loads `pretrained`),
// fine-tunes with validation selection and scores the test split.
AblationTable RunAblation(const std::vector<AblationRow>& rows, const AblationData& data,
                          const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                          const AblationProgress& progress = {});

}  // namespace formstruct

#endif  // FORMSTRUCT_ABLATION_HPP_
