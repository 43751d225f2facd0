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

#include "formstruct/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "formstruct/error.hpp"

namespace formstruct {

namespace {

[[noreturn]] void Bad(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kInvalidArgument,
              "invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

template <typename N>
N ParseNumber(std::string_view key, std::string_view value) {
  N out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) Bad(key, value);
  return out;
}

double ParseReal(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  Bad(key, value);
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  Bad(key, value);
}

std::string Real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Bool(bool v) { return v ? "true" : "false"; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::vector<std::string>& RunConfig::Keys() {
  static const std::vector<std::string> keys = {
      "seed", "out", "corpus", "checkpoint", "task",
      "n_forms", "train_ratio", "validation_ratio", "test_ratio", "vocab_min_freq",
      "vocab_max_size", "cap_per_form",
      "d_model", "n_heads", "encoder_layers", "decoder_layers", "ffn_dim", "dropout",
      "max_source_len", "max_target_len", "variant", "encoder_struct", "decoder_struct",
      "per_head_bias",
      "plain_serialization", "type_tokens", "context",
      "learning_rate", "weight_decay", "clip_norm", "batch_size", "pretrain_steps",
      "mask_budget", "epochs", "beam",
      "ablate_grid", "ablate_seeds"};
  return keys;
}

void RunConfig::Set(std::string_view key, std::string_view value) {
  const std::string v(value);
  if (key == "seed") seed = ParseNumber<std::uint64_t>(key, value);
  else if (key == "out") out = v;
  else if (key == "corpus") corpus = v;
  else if (key == "checkpoint") checkpoint = v;
  else if (key == "task") {
    const auto t = ParseTask(value);
    if (!t) Bad(key, value);
    task = *t;
  } else if (key == "n_forms") n_forms = ParseNumber<int>(key, value);
  else if (key == "train_ratio") train_ratio = ParseReal(key, value);
  else if (key == "validation_ratio") validation_ratio = ParseReal(key, value);
  else if (key == "test_ratio") test_ratio = ParseReal(key, value);
  else if (key == "vocab_min_freq") vocab_min_freq = ParseNumber<int>(key, value);
  else if (key == "vocab_max_size") vocab_max_size = ParseNumber<int>(key, value);
  else if (key == "cap_per_form") cap_per_form = ParseNumber<int>(key, value);
  else if (key == "d_model") d_model = ParseNumber<int>(key, value);
  else if (key == "n_heads") n_heads = ParseNumber<int>(key, value);
  else if (key == "encoder_layers") encoder_layers = ParseNumber<int>(key, value);
  else if (key == "decoder_layers") decoder_layers = ParseNumber<int>(key, value);
  else if (key == "ffn_dim") ffn_dim = ParseNumber<int>(key, value);
  else if (key == "dropout") dropout = ParseReal(key, value);
  else if (key == "max_source_len") max_source_len = ParseNumber<int>(key, value);
  else if (key == "max_target_len") max_target_len = ParseNumber<int>(key, value);
  else if (key == "variant") {
    const auto p = ParseVariant(value);
    if (!p) Bad(key, value);
    variant = *p;
  } else if (key == "encoder_struct") encoder_struct = ParseBool(key, value);
  else if (key == "decoder_struct") decoder_struct = ParseBool(key, value);
  else if (key == "per_head_bias") per_head_bias = ParseBool(key, value);
  else if (key == "plain_serialization") plain_serialization = ParseBool(key, value);
  else if (key == "type_tokens") type_tokens = ParseBool(key, value);
  else if (key == "context") {
    if (value == "full") context = ContextMode::kFull;
    else if (value == "last-title") context = ContextMode::kLastTitle;
    else Bad(key, value);
  } else if (key == "learning_rate") learning_rate = ParseReal(key, value);
  else if (key == "weight_decay") weight_decay = ParseReal(key, value);
  else if (key == "clip_norm") clip_norm = ParseReal(key, value);
  else if (key == "batch_size") batch_size = ParseNumber<int>(key, value);
  else if (key == "pretrain_steps") pretrain_steps = ParseNumber<int>(key, value);
  else if (key == "mask_budget") mask_budget = ParseReal(key, value);
  else if (key == "epochs") epochs = ParseNumber<int>(key, value);
  else if (key == "beam") beam = ParseNumber<int>(key, value);
  else if (key == "ablate_grid") {
    if (value != "removals" && value != "variants" && value != "all") Bad(key, value);
    ablate_grid = v;
  } else if (key == "ablate_seeds") {
    RunConfig probe;
    probe.ablate_seeds = v;
    probe.AblationSeeds();
    ablate_seeds = v;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key: " + std::string(key));
  }
}

std::string RunConfig::Get(std::string_view key) const {
  if (key == "seed") return std::to_string(seed);
  if (key == "out") return out;
  if (key == "corpus") return corpus;
  if (key == "checkpoint") return checkpoint;
  if (key == "task") return std::string(TaskKey(task));
  if (key == "n_forms") return std::to_string(n_forms);
  if (key == "train_ratio") return Real(train_ratio);
  if (key == "validation_ratio") return Real(validation_ratio);
  if (key == "test_ratio") return Real(test_ratio);
  if (key == "vocab_min_freq") return std::to_string(vocab_min_freq);
  if (key == "vocab_max_size") return std::to_string(vocab_max_size);
  if (key == "cap_per_form") return std::to_string(cap_per_form);
  if (key == "d_model") return std::to_string(d_model);
  if (key == "n_heads") return std::to_string(n_heads);
  if (key == "encoder_layers") return std::to_string(encoder_layers);
  if (key == "decoder_layers") return std::to_string(decoder_layers);
  if (key == "ffn_dim") return std::to_string(ffn_dim);
  if (key == "dropout") return Real(dropout);
  if (key == "max_source_len") return std::to_string(max_source_len);
  if (key == "max_target_len") return std::to_string(max_target_len);
  if (key == "variant") return std::string(VariantKey(variant));
  if (key == "encoder_struct") return Bool(encoder_struct);
  if (key == "decoder_struct") return Bool(decoder_struct);
  if (key == "per_head_bias") return Bool(per_head_bias);
  if (key == "plain_serialization") return Bool(plain_serialization);
  if (key == "type_tokens") return Bool(type_tokens);
  if (key == "context") return context == ContextMode::kFull ? "full" : "last-title";
  if (key == "learning_rate") return Real(learning_rate);
  if (key == "weight_decay") return Real(weight_decay);
  if (key == "clip_norm") return Real(clip_norm);
  if (key == "batch_size") return std::to_string(batch_size);
  if (key == "pretrain_steps") return std::to_string(pretrain_steps);
  if (key == "mask_budget") return Real(mask_budget);
  if (key == "epochs") return std::to_string(epochs);
  if (key == "beam") return std::to_string(beam);
  if (key == "ablate_grid") return ablate_grid;
  if (key == "ablate_seeds") return ablate_seeds;
  throw Error(ErrorCode::kInvalidArgument, "unknown config key: " + std::string(key));
}

std::string RunConfig::ToText() const {
  std::string out_text;
  for (const auto& k : Keys()) out_text += k + "=" + Get(k) + "\n";
  return out_text;
}

RunConfig RunConfig::FromText(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = Trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + " is not key=value");
    }
    c.Set(Trim(s.substr(0, eq)), Trim(s.substr(eq + 1)));
  }
  return c;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromText(ss.str());
}

void RunConfig::Save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out_file(path);
  if (!out_file) throw Error(ErrorCode::kIo, "cannot write config " + path.string());
  out_file << ToText();
}

std::string RunConfig::Hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : ToText()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelConfig RunConfig::ToModelConfig(int vocab_size) const {
  ModelConfig m;
  m.d_model = d_model;
  m.n_heads = n_heads;
  m.encoder_layers = encoder_layers;
  m.decoder_layers = decoder_layers;
  m.ffn_dim = ffn_dim;
  m.dropout = dropout;
  m.max_source_len = max_source_len;
  m.max_target_len = max_target_len;
  m.vocab_size = vocab_size;
  m.variant = variant;
  m.sites.encoder_self = encoder_struct;
  m.sites.decoder_self = decoder_struct;
  m.sites.decoder_cross = decoder_struct;
  m.per_head_bias = per_head_bias;
  return m;
}

SerializeOptions RunConfig::ToSerializeOptions() const {
  SerializeOptions s;
  s.max_source_len = static_cast<std::size_t>(max_source_len);
  s.type_tokens = type_tokens;
  s.plain = plain_serialization;
  s.context = context;
  return s;
}

OptimOptions RunConfig::ToOptimOptions() const {
  OptimOptions o;
  o.adamw.learning_rate = learning_rate;
  o.adamw.weight_decay = weight_decay;
  o.clip_norm = clip_norm;
  o.batch_size = batch_size;
  return o;
}

EvalOptions RunConfig::ToEvalOptions() const {
  EvalOptions e;
  e.serialize = ToSerializeOptions();
  e.beam = beam;
  e.max_target_len = max_target_len;
  return e;
}

std::vector<std::uint64_t> RunConfig::AblationSeeds() const {
  std::vector<std::uint64_t> seeds;
  std::string_view rest = ablate_seeds;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = Trim(rest.substr(0, comma));
    if (item.empty()) Bad("ablate_seeds", ablate_seeds);
    seeds.push_back(ParseNumber<std::uint64_t>("ablate_seeds", item));
    rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
  }
  if (seeds.empty()) Bad("ablate_seeds", ablate_seeds);
  return seeds;
}

}  // namespace formstruct
