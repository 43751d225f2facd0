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

#include <cmath>
#include <set>

#include <json.hpp>

#include "formstruct/ablation.hpp"
#include "formstruct/config.hpp"
#include "formstruct/error.hpp"
#include "helpers.hpp"

using namespace formstruct;

namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("every key round trips through text") {
  RunConfig c;
  c.Set("task", "options");
  c.Set("variant", "hybridstar");
  c.Set("context", "last-title");
  c.Set("d_model", "64");
  c.Set("learning_rate", "0.00123");
  c.Set("decoder_struct", "false");
  c.Set("checkpoint", "a/b.ckpt");
  c.Set("ablate_seeds", "4,5");
  const RunConfig back = RunConfig::FromText(c.ToText());
  for (const auto& k : RunConfig::Keys()) CHECK(back.Get(k) == c.Get(k));
  CHECK(back.Hash() == c.Hash());
  CHECK(back.task == Task::kOptionsRec);
  CHECK(back.context == ContextMode::kLastTitle);
  CHECK(back.learning_rate == 0.00123);
  CHECK(back.AblationSeeds() == std::vector<std::uint64_t>{4, 5});

  for (const auto& k : RunConfig::Keys()) {
    RunConfig d;
    d.Set(k, c.Get(k));
    CHECK(d.Get(k) == c.Get(k));
  }
  std::set<std::string> unique(RunConfig::Keys().begin(), RunConfig::Keys().end());
  CHECK(unique.size() == RunConfig::Keys().size());
}

TEST_CASE("comments, blank lines and files") {
  const RunConfig c = RunConfig::FromText("# header\n\nseed=9  \n  beam = 3 # inline\n");
  CHECK(c.seed == 9);
  CHECK(c.beam == 3);
  const auto dir = testing::ScratchDir("config");
  c.Save(dir / "c.txt");
  CHECK(RunConfig::Load(dir / "c.txt").ToText() == c.ToText());
  CHECK_THROWS_AS(RunConfig::Load(dir / "absent.txt"), Error);
}

TEST_CASE("bad keys and values") {
  RunConfig c;
  CHECK(CodeOf([&] { c.Set("no_such_key", "1"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("d_model", "sixty"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("d_model", "64x"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("variant", "quadratic"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("task", "summarize"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("encoder_struct", "maybe"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("ablate_seeds", "1,,x"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { c.Set("ablate_grid", "everything"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { RunConfig::FromText("seed\n"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { (void)c.Get("no_such_key"); }) == ErrorCode::kInvalidArgument);
  CHECK(c.ToText() == RunConfig().ToText());
}

TEST_CASE("hash is stable and sensitive") {
  const RunConfig a;
  CHECK(a.Hash().size() == 16);
  CHECK(a.Hash() == RunConfig().Hash());
  for (const auto& k : {"seed", "d_model", "variant", "type_tokens", "learning_rate"}) {
    RunConfig b;
    b.Set(k, std::string(k) == "variant" ? "mask" : std::string(k) == "type_tokens" ? "false" :
                                                 std::string(k) == "learning_rate" ? "0.5" : "7");
    CHECK(b.Hash() != a.Hash());
  }
}

TEST_CASE("derived option structs") {
  RunConfig c;
  c.d_model = 32;
  c.n_heads = 2;
  c.decoder_struct = false;
  c.encoder_struct = true;
  c.per_head_bias = true;
  c.variant = AttentionVariant::kDistOnly;
  c.max_source_len = 100;
  c.max_target_len = 20;
  const ModelConfig m = c.ToModelConfig(50);
  CHECK(m.vocab_size == 50);
  CHECK(m.d_model == 32);
  CHECK(m.sites.encoder_self);
  CHECK_FALSE(m.sites.decoder_self);
  CHECK_FALSE(m.sites.decoder_cross);
  CHECK(m.per_head_bias);
  CHECK(m.variant == AttentionVariant::kDistOnly);

  c.plain_serialization = true;
  c.type_tokens = false;
  c.context = ContextMode::kLastTitle;
  const SerializeOptions s = c.ToSerializeOptions();
  CHECK(s.plain);
  CHECK_FALSE(s.type_tokens);
  CHECK(s.context == ContextMode::kLastTitle);
  CHECK(s.max_source_len == 100);

  c.learning_rate = 0.01;
  c.weight_decay = 0.1;
  c.batch_size = 7;
  c.clip_norm = 2.0;
  const OptimOptions o = c.ToOptimOptions();
  CHECK(o.adamw.learning_rate == 0.01);
  CHECK(o.adamw.weight_decay == 0.1);
  CHECK(o.batch_size == 7);
  CHECK(o.clip_norm == 2.0);
  c.beam = 3;
  CHECK(c.ToEvalOptions().beam == 3);
  CHECK(c.ToEvalOptions().max_target_len == 20);
}

TEST_CASE("ablation rows") {
  RunConfig base;
  const auto rows = RemovalRows(base);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].name == "full");
  CHECK(rows[0].encoder_struct);
  CHECK(rows[0].decoder_struct);
  // Removals accumulate down the table.
  CHECK_FALSE(rows[1].decoder_struct);
  CHECK(rows[1].encoder_struct);
  CHECK_FALSE(rows[2].encoder_struct);
  CHECK(rows[3].plain_serialization);
  CHECK_FALSE(rows[3].encoder_struct);
  CHECK(rows[4].context == ContextMode::kLastTitle);
  CHECK(rows[4].plain_serialization);
  // Type tokens are removed from the full model alone.
  CHECK(rows[5].name == "- type tokens");
  CHECK_FALSE(rows[5].type_tokens);
  CHECK(rows[5].encoder_struct);
  CHECK_FALSE(rows[5].plain_serialization);

  const auto variants = VariantRows(base);
  CHECK(variants.size() == 5);
  base.ablate_grid = "all";
  CHECK(GridRows(base).size() == 10);

  RunConfig applied;
  rows[4].ApplyTo(applied);
  CHECK(applied.context == ContextMode::kLastTitle);
  CHECK_FALSE(applied.decoder_struct);
}

TEST_CASE("ablation table statistics") {
  AblationTable t;
  t.task = Task::kTypeSuggest;
  t.seeds = {1, 2, 3};
  t.rows.push_back({"full", {{"macro_f1", {0.5, 0.7, 0.9}}}});
  t.rows.push_back({"- x", {{"macro_f1", {0.4}}}});
  CHECK(t.Mean(0, "macro_f1") == doctest::Approx(0.7));
  CHECK(t.StdDev(0, "macro_f1") == doctest::Approx(0.2));
  CHECK(t.StdDev(1, "macro_f1") == 0.0);
  const std::string md = t.ToMarkdown();
  CHECK(md.find("| full | 0.7000 ± 0.2000 |") != std::string::npos);
  const auto j = nlohmann::json::parse(t.ToJson());
  CHECK(j["task"] == "type");
  CHECK(j["rows"][0]["metrics"]["macro_f1"]["std"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("a small ablation runs end to end and is reproducible") {
  const auto forms = testing::Synthetic(40, 2);
  const CorpusSplit split = SplitCorpus(forms, {0.6, 0.2, 0.2}, 1);
  AblationData data{split.train, split.validation, split.test, testing::VocabFor(split.train), std::nullopt};
  RunConfig base;
  base.task = Task::kTypeSuggest;
  base.d_model = 16;
  base.n_heads = 2;
  base.encoder_layers = 1;
  base.decoder_layers = 1;
  base.ffn_dim = 32;
  base.dropout = 0.0;
  base.max_source_len = 160;
  base.max_target_len = 16;
  base.epochs = 2;
  base.batch_size = 8;
  base.learning_rate = 1e-3;
  base.cap_per_form = 2;
  std::vector<AblationRow> rows = RemovalRows(base);
  rows.resize(2);
  int calls = 0;
  const AblationTable a = RunAblation(rows, data, base, {1, 2}, [&](const std::string&, std::uint64_t, const EvalResult&) { ++calls; });
  CHECK(calls == 4);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.rows[1].row == "- decoder struct");
  CHECK(a.rows[0].metrics.at("macro_f1").size() == 2);
  const AblationTable b = RunAblation(rows, data, base, {1, 2});
  CHECK(a.ToJson() == b.ToJson());
  CHECK(CodeOf([&] { RunAblation(rows, data, base, {}); }) == ErrorCode::kInvalidArgument);
}
