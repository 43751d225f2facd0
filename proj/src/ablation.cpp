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

#include "formstruct/ablation.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "formstruct/error.hpp"

namespace formstruct {

void AblationRow::ApplyTo(RunConfig& config) const {
  config.variant = variant;
  config.encoder_struct = encoder_struct;
  config.decoder_struct = decoder_struct;
  config.plain_serialization = plain_serialization;
  config.type_tokens = type_tokens;
  config.context = context;
}

namespace {

AblationRow FullRow(const RunConfig& base) {
  AblationRow r;
  r.name = "full";
  r.variant = base.variant;
  return r;
}

}  // namespace

std::vector<AblationRow> RemovalRows(const RunConfig& base) {
  std::vector<AblationRow> rows;
  AblationRow r = FullRow(base);
  rows.push_back(r);
  r.name = "- decoder struct";
  r.decoder_struct = false;
  rows.push_back(r);
  r.name = "- encoder struct";
  r.encoder_struct = false;
  rows.push_back(r);
  r.name = "- form serialization";
  r.plain_serialization = true;
  rows.push_back(r);
  r.name = "- previous context";
  r.context = ContextMode::kLastTitle;
  rows.push_back(r);
  AblationRow t = FullRow(base);
  t.name = "- type tokens";
  t.type_tokens = false;
  rows.push_back(t);
  return rows;
}

std::vector<AblationRow> VariantRows(const RunConfig& base) {
  std::vector<AblationRow> rows;
  for (AttentionVariant v : {AttentionVariant::kHybrid, AttentionVariant::kTypeOnly, AttentionVariant::kDistOnly,
                             AttentionVariant::kHybridStar, AttentionVariant::kMask}) {
    AblationRow r = FullRow(base);
    r.variant = v;
    r.name = std::string(VariantKey(v));
    rows.push_back(r);
  }
  return rows;
}

std::vector<AblationRow> GridRows(const RunConfig& base) {
  if (base.ablate_grid == "variants") return VariantRows(base);
  if (base.ablate_grid == "removals") return RemovalRows(base);
  auto rows = VariantRows(base);
  for (auto& r : RemovalRows(base)) {
    if (r.name != "full") rows.push_back(r);
  }
  return rows;
}

double AblationTable::Mean(std::size_t row, const std::string& metric) const {
  const auto& v = rows.at(row).metrics.at(metric);
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double AblationTable::StdDev(std::size_t row, const std::string& metric) const {
  const auto& v = rows.at(row).metrics.at(metric);
  if (v.size() < 2) return 0.0;
  const double m = Mean(row, metric);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string AblationTable::ToMarkdown() const {
  if (rows.empty()) return "";
  std::vector<std::string> names;
  for (const auto& [k, _] : rows.front().metrics) names.push_back(k);
  std::string out = "| setting |";
  for (const auto& n : names) out += " " + n + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < names.size(); ++i) out += "---|";
  out += "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += "| " + rows[r].row + " |";
    for (const auto& n : names) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %.4f ± %.4f |", Mean(r, n), StdDev(r, n));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string AblationTable::ToJson() const {
  nlohmann::ordered_json j;
  j["task"] = std::string(TaskKey(task));
  j["seeds"] = seeds;
  j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    nlohmann::ordered_json row;
    row["setting"] = rows[r].row;
    for (const auto& [k, v] : rows[r].metrics) {
      row["metrics"][k] = {{"values", v}, {"mean", Mean(r, k)}, {"std", StdDev(r, k)}};
    }
    j["rows"].push_back(row);
  }
  return j.dump(2);
}

AblationTable RunAblation(const std::vector<AblationRow>& rows, const AblationData& data,
                          const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                          const AblationProgress& progress) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "ablation needs at least one seed");
  AblationTable table;
  table.task = base.task;
  table.seeds = seeds;
  for (const auto& row : rows) {
    AblationCellResult cell;
    cell.row = row.name;
    for (std::uint64_t seed : seeds) {
      RunConfig cfg = base;
      row.ApplyTo(cfg);
      cfg.seed = seed;
      SamplingOptions sampling{cfg.cap_per_form, seed};
      const auto train = SampleTaskInstances(data.train, cfg.task, sampling);
      const auto validation = SampleTaskInstances(data.validation, cfg.task, sampling);
      const auto test = SampleTaskInstances(data.test, cfg.task, sampling);
      if (train.empty() || test.empty()) {
        throw Error(ErrorCode::kEmptyCorpus, "no task instances for the ablation splits");
      }

      Seq2SeqModel<float> model(cfg.ToModelConfig(static_cast<int>(data.vocab.size())),
                                MixSeed(seed, 0));
      if (data.pretrained) LoadParameters(model, *data.pretrained);
      FinetuneOptions ft;
      ft.epochs = cfg.epochs;
      ft.optim = cfg.ToOptimOptions();
      ft.eval = cfg.ToEvalOptions();
      ft.seed = seed;
      Finetune(model, train, validation, data.vocab, ft);
      const EvalResult result = Evaluate(model, test, data.vocab, ft.eval);
      for (const auto& [k, v] : result.metrics) cell.metrics[k].push_back(v);
      if (progress) progress(row.name, seed, result);
    }
    table.rows.push_back(std::move(cell));
  }
  return table;
}

}  // namespace formstruct
