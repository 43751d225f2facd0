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

#ifndef FORMSTRUCT_CORPUS_HPP_
#define FORMSTRUCT_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "formstruct/form.hpp"
#include "formstruct/task.hpp"

namespace formstruct {

struct FormRecord {
  std::string id;
  Form form;

  friend bool operator==(const FormRecord&, const FormRecord&) = default;
};

// --- JSON schema ----------------------------------------------------------
// {"id"?, "title", "description"?, "body": [{"type", "title", "description"?,
//   "options"?, "rows"?, "columns"?}, ...]}

// Parses one document. Every text field is stripped of non-ASCII bytes and
// normalized. Throws MalformedDocument, UnknownBlockType or InvalidForm.
Form IngestJson(std::string_view document);
FormRecord IngestRecord(std::string_view document, std::string fallback_id);

// Inverse writer: IngestJson(EmitJson(f)) == f for valid normalized forms.
std::string EmitJson(const Form& form, const std::string& id = "");

std::vector<FormRecord> ReadFormsJsonl(const std::filesystem::path& path);
void WriteFormsJsonl(const std::filesystem::path& path, std::span<const FormRecord> records);

// --- Filtering and splitting ----------------------------------------------

using LanguageFilter = std::function<bool(const Form&)>;

// Keeps forms with at least one non-Description block and no two blocks that
// share (type, title). `language` defaults to accepting everything.
std::vector<FormRecord> FilterCorpus(std::span<const FormRecord> forms,
                                     const LanguageFilter& language = {});

struct CorpusSplit {
  std::vector<FormRecord> train;
  std::vector<FormRecord> validation;
  std::vector<FormRecord> test;
  std::uint64_t seed = 0;
};

// Shuffles with `seed`, then partitions. Validation and test sizes are
// round(n * ratio); train takes the rest. Throws EmptyCorpus and
// InvalidArgument (ratios not summing to one).
CorpusSplit SplitCorpus(std::span<const FormRecord> forms,
                        std::array<double, 3> ratios, std::uint64_t seed);

void WriteManifest(const std::filesystem::path& path, std::span<const FormRecord> part);
std::vector<std::string> ReadManifest(const std::filesystem::path& path);
// Selects records by id in manifest order; unknown ids are an error.
std::vector<FormRecord> SelectById(std::span<const FormRecord> forms,
                                   std::span<const std::string> ids);

// --- Task samples -----------------------------------------------------------

struct SamplingOptions {
  int cap_per_form = 5;
  std::uint64_t seed = 0;
  bool question_includes_description_blocks = true;
};

// Builds the TaskSample for block B_i (1-based) of `record`.
TaskSample MakeSample(const FormRecord& record, Task task, int block_index);

// Eligible blocks: all for question/type tasks; Choice blocks with at least
// one option for options recommendation. At most `cap_per_form` per form,
// chosen uniformly without replacement, returned in block order.
std::vector<TaskSample> SampleTaskInstances(std::span<const FormRecord> forms, Task task,
                                            const SamplingOptions& options = {});

void WriteTaskSamples(const std::filesystem::path& path, std::span<const TaskSample> samples);
std::vector<TaskSample> ReadTaskSamples(const std::filesystem::path& path,
                                        std::span<const FormRecord> forms);

// --- Synthetic corpus -------------------------------------------------------

struct KeywordRule {
  std::vector<std::string> keywords;  // single words or space-separated phrases
  BlockType type;
};

struct QuestionTemplate {
  std::string title;
  std::vector<std::string> options;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
};

struct TopicTemplate {
  std::string name;
  std::vector<std::string> form_titles;
  std::vector<std::string> descriptions;
  std::string welcome;  // Description block text
  std::vector<QuestionTemplate> questions;  // in canonical order
};

// Every text field is emitted in the tokenizer's canonical spelling
// (lowercase, punctuation set off by spaces) so serialization round-trips.
struct SyntheticSpec {
  int n_forms = 1000;
  std::vector<TopicTemplate> topics;
  std::vector<std::string> organizations;
  int min_blocks = 3;
  int max_blocks = 8;
  std::vector<KeywordRule> rules;
  // Keyword-free titles. A group of consecutive blocks with these titles
  // shares one type drawn from `neutral_types`; only the first block of the
  // group is unpredictable from the context.
  std::vector<std::string> neutral_titles;
  std::vector<BlockType> neutral_types;
  double neutral_group_prob = 0.5;
  double welcome_prob = 0.3;
  double form_description_prob = 0.5;
  double block_description_prob = 0.1;
  std::uint64_t seed = 1;
};

SyntheticSpec DefaultSyntheticSpec(int n_forms, std::uint64_t seed);

// First rule whose keyword occurs as a whole-token sequence in `title`.
std::optional<BlockType> PlantedType(std::string_view title, std::span<const KeywordRule> rules);

// Forms are ids "syn-000000", ...; deterministic in spec.seed.
std::vector<FormRecord> GenerateSyntheticCorpus(const SyntheticSpec& spec);

}  // namespace formstruct

#endif  // FORMSTRUCT_CORPUS_HPP_
