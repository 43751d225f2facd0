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

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "formstruct/corpus.hpp"
#include "formstruct/error.hpp"
#include "helpers.hpp"

using namespace formstruct;

#ifndef FORMSTRUCT_TEST_DATA_DIR
#error "FORMSTRUCT_TEST_DATA_DIR must point at tests/data"
#endif

namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

FormRecord Rec(std::string id, std::vector<Block> blocks) {
  return {std::move(id), Form{"form", std::nullopt, std::move(blocks)}};
}

Block TextBlock(std::string title) { return {BlockType::kTextField, std::move(title), {}, {}, {}, {}}; }

}  // namespace

TEST_CASE("ingest_json maps the schema") {
  const Form f = IngestJson(R"({"title":"T","body":[{"type":"choice","title":"Q","options":["Yes","No"]}]})");
  const Form want{"T", std::nullopt, {{BlockType::kChoice, "Q", std::nullopt, {"Yes", "No"}, {}, {}}}};
  CHECK(f == want);
}

TEST_CASE("ingest_json errors") {
  CHECK(CodeOf([] { IngestJson(R"({"title":"T"})"); }) == ErrorCode::kMalformedDocument);
  CHECK(CodeOf([] { IngestJson("{not json"); }) == ErrorCode::kMalformedDocument);
  CHECK(CodeOf([] { IngestJson(R"({"title":"T","body":[{"type":"ranking","title":"Q"}]})"); }) ==
        ErrorCode::kUnknownBlockType);
  CHECK(CodeOf([] { IngestJson(R"({"title":"T","body":[]})"); }) == ErrorCode::kInvalidForm);
  CHECK(CodeOf([] { IngestJson(R"({"title":"T","body":[{"type":"likert","title":"L","rows":["a"]}]})"); }) ==
        ErrorCode::kInvalidForm);
}

TEST_CASE("ingest_json normalizes text and strips non-ASCII") {
  const Form f = IngestJson(
      "{\"title\":\"  Caf\xC3\xA9   survey \",\"body\":[{\"type\":\"choice\",\"title\":\"a | b\","
      "\"options\":[\"x\\ty\"]},{\"type\":\"description\",\"description\":\"hello\"}]}");
  CHECK(f.title == "Caf survey");
  CHECK(f.blocks[0].title == "a / b");
  CHECK(f.blocks[0].options[0] == "x y");
  CHECK(f.blocks[1].title == "hello");
  CHECK_FALSE(f.blocks[1].description.has_value());
}

TEST_CASE("emit_json matches the golden file and ingest inverts it") {
  std::ifstream in(std::string(FORMSTRUCT_TEST_DATA_DIR) + "/golden_form.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  const FormRecord r = IngestRecord(line, "fallback");
  CHECK(r.id == "golden-1");
  CHECK(EmitJson(r.form, r.id) == line);
  CHECK(IngestJson(EmitJson(r.form)) == r.form);
  for (const auto& s : testing::Synthetic(200, 11)) CHECK(IngestJson(EmitJson(s.form, s.id)) == s.form);
}

TEST_CASE("jsonl and manifest files round trip") {
  const auto forms = testing::Synthetic(30, 2);
  const auto dir = testing::ScratchDir("corpus-io");
  WriteFormsJsonl(dir / "forms.jsonl", forms);
  CHECK(ReadFormsJsonl(dir / "forms.jsonl") == forms);
  const std::vector<FormRecord> part(forms.begin() + 5, forms.begin() + 9);
  WriteManifest(dir / "part.txt", part);
  const auto ids = ReadManifest(dir / "part.txt");
  CHECK(SelectById(forms, ids) == part);
  const std::vector<std::string> unknown = {"nope"};
  CHECK_THROWS_AS(SelectById(forms, unknown), Error);
}

TEST_CASE("filter_corpus") {
  std::vector<FormRecord> forms;
  forms.push_back(Rec("only-desc", {{BlockType::kDescription, "hello", {}, {}, {}, {}}}));
  forms.push_back(Rec("dupe", {TextBlock("Name"), TextBlock("name")}));
  forms.push_back(Rec("ok", {TextBlock("a"), TextBlock("b"), {BlockType::kDate, "a", {}, {}, {}, {}}}));
  const auto kept = FilterCorpus(forms);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "ok");
  const auto none = FilterCorpus(forms, [](const Form&) { return false; });
  CHECK(none.empty());
}

TEST_CASE("split_corpus") {
  const auto forms = testing::Synthetic(10, 1);
  const CorpusSplit s = SplitCorpus(forms, {0.8, 0.1, 0.1}, 7);
  CHECK(s.train.size() == 8);
  CHECK(s.validation.size() == 1);
  CHECK(s.test.size() == 1);
  const CorpusSplit again = SplitCorpus(forms, {0.8, 0.1, 0.1}, 7);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  std::set<std::string> ids;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (const auto& r : *part) CHECK(ids.insert(r.id).second);
  }
  CHECK(ids.size() == forms.size());
  CHECK_THROWS_AS(SplitCorpus(forms, {0.5, 0.5, 0.1}, 7), Error);
  CHECK(CodeOf([] { SplitCorpus({}, {0.8, 0.1, 0.1}, 1); }) == ErrorCode::kEmptyCorpus);
}

TEST_CASE("sample_task_instances") {
  std::vector<Block> nine;
  for (int i = 0; i < 9; ++i) nine.push_back(TextBlock("q" + std::to_string(i)));
  const std::vector<FormRecord> forms = {
      Rec("three", {TextBlock("a"), TextBlock("b"), TextBlock("c")}), Rec("nine", nine)};
  const auto type = SampleTaskInstances(forms, Task::kTypeSuggest, {5, 3});
  CHECK(std::count_if(type.begin(), type.end(), [](const TaskSample& s) { return s.form_id == "three"; }) == 3);
  CHECK(std::count_if(type.begin(), type.end(), [](const TaskSample& s) { return s.form_id == "nine"; }) == 5);
  CHECK(SampleTaskInstances(forms, Task::kOptionsRec, {5, 3}).empty());
  CHECK(SampleTaskInstances(forms, Task::kTypeSuggest, {5, 3}).size() == type.size());
  CHECK_THROWS_AS(SampleTaskInstances(forms, Task::kTypeSuggest, {0, 3}), Error);

  const auto synthetic = testing::Synthetic(100, 4);
  for (Task task : {Task::kQuestionRec, Task::kTypeSuggest, Task::kOptionsRec}) {
    const auto samples = SampleTaskInstances(synthetic, task, {5, 9});
    const auto again = SampleTaskInstances(synthetic, task, {5, 9});
    REQUIRE(samples.size() == again.size());
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const TaskSample& s = samples[k];
      CHECK(s.block_index == again[k].block_index);
      CHECK(seen.insert({s.form_id, s.block_index}).second);
      CHECK(s.context.blocks.size() == static_cast<std::size_t>(s.block_index - 1));
      if (task == Task::kOptionsRec) {
        CHECK(s.block_type == BlockType::kChoice);
        CHECK_FALSE(s.target.empty());
      }
    }
  }
}

TEST_CASE("make_sample targets") {
  const FormRecord r{"k", testing::KitchenSinkForm()};
  const TaskSample opt = MakeSample(r, Task::kOptionsRec, 3);
  CHECK(opt.target == "monday | tuesday | friday");
  CHECK(opt.block_title == "which day works ?");
  CHECK(opt.context.blocks.size() == 2);
  CHECK(MakeSample(r, Task::kTypeSuggest, 6).target == "Likert");
  CHECK(MakeSample(r, Task::kQuestionRec, 1).context.blocks.empty());
  CHECK_THROWS_AS(MakeSample(r, Task::kQuestionRec, 9), Error);
}

TEST_CASE("task sample files round trip") {
  const auto forms = testing::Synthetic(20, 8);
  const auto samples = SampleTaskInstances(forms, Task::kOptionsRec, {5, 1});
  const auto dir = testing::ScratchDir("samples");
  WriteTaskSamples(dir / "s.jsonl", samples);
  const auto back = ReadTaskSamples(dir / "s.jsonl", forms);
  REQUIRE(back.size() == samples.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].form_id == samples[k].form_id);
    CHECK(back[k].block_index == samples[k].block_index);
    CHECK(back[k].target == samples[k].target);
    CHECK(back[k].context == samples[k].context);
  }
}

TEST_CASE("synthetic corpus is valid, deterministic and obeys the planted rules") {
  const SyntheticSpec spec = DefaultSyntheticSpec(1000, 1);
  const auto forms = GenerateSyntheticCorpus(spec);
  CHECK(forms.size() == 1000);
  CHECK(GenerateSyntheticCorpus(DefaultSyntheticSpec(1, 1)) == GenerateSyntheticCorpus(DefaultSyntheticSpec(1, 1)));
  CHECK(FilterCorpus(forms).size() == forms.size());

  // Re-derive the rule table's verdict for every template and every block.
  for (const auto& topic : spec.topics) {
    for (const auto& q : topic.questions) CHECK(PlantedType(q.title, spec.rules).has_value());
  }
  std::set<std::string> neutral(spec.neutral_titles.begin(), spec.neutral_titles.end());
  for (const auto& t : spec.neutral_titles) CHECK_FALSE(PlantedType(t, spec.rules).has_value());
  int neutral_blocks = 0;
  for (const auto& r : forms) {
    CHECK(ValidateForm(r.form).empty());
    for (const Block& b : r.form.blocks) {
      const auto planted = PlantedType(b.title, spec.rules);
      if (planted) {
        CHECK(b.type == *planted);
      } else {
        CHECK(neutral.count(b.title) == 1);
        ++neutral_blocks;
      }
    }
  }
  CHECK(neutral_blocks > 0);
}

TEST_CASE("planted_type matches whole tokens, first rule wins") {
  const std::vector<KeywordRule> rules = {{{"date"}, BlockType::kDate}, {{"do you"}, BlockType::kChoice},
                                          {{"name"}, BlockType::kTextField}};
  CHECK(PlantedType("departure date", rules) == BlockType::kDate);
  CHECK(PlantedType("do you have a name ?", rules) == BlockType::kChoice);
  CHECK(PlantedType("your name", rules) == BlockType::kTextField);
  CHECK_FALSE(PlantedType("update", rules).has_value());
  CHECK_FALSE(PlantedType("you do", rules).has_value());
}
