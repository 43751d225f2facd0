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

// Command-line driver: corpus generation, pre-training, fine-tuning,
// evaluation, ablation grids, single-form recommendation and inspection.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "formstruct/ablation.hpp"
#include "formstruct/checkpoint.hpp"
#include "formstruct/config.hpp"
#include "formstruct/corpus.hpp"
#include "formstruct/decode.hpp"
#include "formstruct/error.hpp"
#include "formstruct/serializer.hpp"
#include "formstruct/train.hpp"

namespace fs = std::filesystem;
using namespace formstruct;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by every subcommand; they override the config file.
struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> corpus;
  std::optional<std::string> checkpoint;
  std::optional<std::string> task;
  std::optional<std::string> variant;
  std::optional<std::string> context;
  bool no_encoder_struct = false;
  bool no_decoder_struct = false;
  bool plain_serialization = false;
  bool no_type_tokens = false;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key=value config file");
  cmd->add_option("--set", f.sets, "override one config key (key=value), repeatable");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
}

void AddModelFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--corpus", f.corpus, "corpus directory written by gen-corpus");
  cmd->add_option("--checkpoint", f.checkpoint, "checkpoint file");
  cmd->add_option("--task", f.task, "question | options | type");
  cmd->add_option("--variant", f.variant, "hybrid | type | dist | hybridstar | mask");
  cmd->add_option("--context", f.context, "full | last-title");
  cmd->add_flag("--no-encoder-struct", f.no_encoder_struct, "plain encoder self-attention");
  cmd->add_flag("--no-decoder-struct", f.no_decoder_struct, "plain decoder self/cross-attention");
  cmd->add_flag("--plain-serialization", f.plain_serialization, "concatenate text only");
  cmd->add_flag("--no-type-tokens", f.no_type_tokens, "replace block type tokens with <type>");
}

RunConfig ResolveConfig(const CommonFlags& f) {
  try {
    RunConfig c = f.config_path.empty() ? RunConfig() : RunConfig::Load(f.config_path);
    for (const auto& kv : f.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      c.Set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.out = *f.out;
    if (f.corpus) c.corpus = *f.corpus;
    if (f.checkpoint) c.checkpoint = *f.checkpoint;
    if (f.task) c.Set("task", *f.task);
    if (f.variant) c.Set("variant", *f.variant);
    if (f.context) c.Set("context", *f.context);
    if (f.no_encoder_struct) c.encoder_struct = false;
    if (f.no_decoder_struct) c.decoder_struct = false;
    if (f.plain_serialization) c.plain_serialization = true;
    if (f.no_type_tokens) c.type_tokens = false;
    return c;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw UsageError(e.what());
    throw;
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Corpus {
  std::vector<FormRecord> train, validation, test;
  Vocab vocab;
};

Corpus LoadCorpus(const fs::path& dir) {
  const auto forms = ReadFormsJsonl(dir / "forms.jsonl");
  Corpus c;
  c.train = SelectById(forms, ReadManifest(dir / "train.txt"));
  c.validation = SelectById(forms, ReadManifest(dir / "validation.txt"));
  c.test = SelectById(forms, ReadManifest(dir / "test.txt"));
  c.vocab = Vocab::Load(dir / "vocab.txt");
  return c;
}

// Model and serialization switches travel with a fine-tuned checkpoint.
void RecordSwitches(Checkpoint& ckpt, const RunConfig& c) {
  for (const char* key : {"task", "plain_serialization", "type_tokens", "context", "beam"}) {
    ckpt.metadata[key] = c.Get(key);
  }
}

void ApplySwitches(const Checkpoint& ckpt, RunConfig& c) {
  for (const char* key : {"plain_serialization", "type_tokens", "context", "beam"}) {
    if (auto it = ckpt.metadata.find(key); it != ckpt.metadata.end()) c.Set(key, it->second);
  }
  c.variant = ckpt.config.variant;
  c.encoder_struct = ckpt.config.sites.encoder_self;
  c.decoder_struct = ckpt.config.sites.decoder_self;
  c.max_source_len = ckpt.config.max_source_len;
  c.max_target_len = ckpt.config.max_target_len;
}

ModelConfig ConfigForRun(const RunConfig& c, const std::optional<Checkpoint>& base, int vocab_size) {
  if (!base) return c.ToModelConfig(vocab_size);
  // Shapes come from the checkpoint; attention switches from the run.
  ModelConfig m = base->config;
  const ModelConfig wanted = c.ToModelConfig(vocab_size);
  m.variant = wanted.variant;
  m.sites = wanted.sites;
  m.dropout = wanted.dropout;
  return m;
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// --- subcommands --------------------------------------------------------------

struct GenFlags {
  int n = -1;
  std::string from;
};

int CmdGenCorpus(const CommonFlags& f, const GenFlags& g) {
  RunConfig c = ResolveConfig(f);
  if (g.n >= 0) c.n_forms = g.n;
  std::vector<FormRecord> forms;
  if (!g.from.empty()) {
    std::ifstream in(g.from);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + g.from);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        forms.push_back(IngestRecord(line, "form-" + std::to_string(line_no)));
      } catch (const Error& e) {
        throw Error(e.code(), g.from + ":" + std::to_string(line_no) + ": " + e.message());
      }
    }
    forms = FilterCorpus(forms);
  } else {
    if (c.n_forms <= 0) throw UsageError("--n must be positive");
    forms = GenerateSyntheticCorpus(DefaultSyntheticSpec(c.n_forms, c.seed));
  }
  const CorpusSplit split =
      SplitCorpus(forms, {c.train_ratio, c.validation_ratio, c.test_ratio}, c.seed);
  const fs::path out = c.out;
  fs::create_directories(out);
  WriteFormsJsonl(out / "forms.jsonl", forms);
  WriteManifest(out / "train.txt", split.train);
  WriteManifest(out / "validation.txt", split.validation);
  WriteManifest(out / "test.txt", split.test);
  std::vector<Form> train_forms;
  for (const auto& r : split.train) train_forms.push_back(r.form);
  const Vocab vocab = Vocab::Build(CollectTexts(train_forms), c.vocab_min_freq,
                                   static_cast<std::size_t>(c.vocab_max_size));
  vocab.Save(out / "vocab.txt");
  c.corpus = out.string();
  c.Save(out / "config.txt");
  std::cout << "wrote " << forms.size() << " forms (" << split.train.size() << "/"
            << split.validation.size() << "/" << split.test.size() << " train/validation/test), "
            << vocab.size() << " vocabulary entries to " << out.string() << "\n";
  return kExitOk;
}

int CmdPretrain(const CommonFlags& f, std::optional<int> steps) {
  RunConfig c = ResolveConfig(f);
  if (steps) c.pretrain_steps = *steps;
  const Corpus corpus = LoadCorpus(c.corpus);
  std::optional<Checkpoint> base;
  if (!c.checkpoint.empty()) base = LoadCheckpoint(c.checkpoint);
  Seq2SeqModel<float> model(ConfigForRun(c, base, static_cast<int>(corpus.vocab.size())), c.seed);
  if (base) LoadParameters(model, *base);

  const fs::path out = c.out;
  fs::create_directories(out);
  std::ofstream log(out / "pretrain_log.tsv");
  log << "step\tloss\tgrad_norm\n";
  PretrainOptions po;
  po.steps = c.pretrain_steps;
  po.optim = c.ToOptimOptions();
  po.mask_budget = c.mask_budget;
  po.seed = c.seed;
  po.on_step = [&](const TrainLog& l) {
    log << l.step << '\t' << l.loss << '\t' << l.grad_norm << '\n';
    if (l.step % 50 == 0 || l.step == 1) std::cerr << "step " << l.step << " loss " << l.loss << "\n";
  };
  const PretrainResult r = Pretrain(model, corpus.train, corpus.vocab, po);
  Checkpoint ckpt = MakeCheckpoint(model, corpus.vocab, (base ? base->step : 0) + c.pretrain_steps);
  ckpt.metadata["stage"] = "pretrain";
  SaveCheckpoint(out / "pretrain.ckpt", ckpt);
  c.checkpoint = (out / "pretrain.ckpt").string();
  c.Save(out / "config.txt");
  std::cout << "pretrained " << r.losses.size() << " steps";
  if (!r.losses.empty()) std::cout << ", final loss " << r.losses.back();
  std::cout << "; checkpoint " << (out / "pretrain.ckpt").string() << "\n";
  return kExitOk;
}

int CmdFinetune(const CommonFlags& f, std::optional<int> epochs) {
  RunConfig c = ResolveConfig(f);
  if (epochs) c.epochs = *epochs;
  const Corpus corpus = LoadCorpus(c.corpus);
  std::optional<Checkpoint> base;
  if (!c.checkpoint.empty()) {
    base = LoadCheckpoint(c.checkpoint);
    if (!(base->vocab == corpus.vocab)) {
      throw Error(ErrorCode::kInvalidArgument, "checkpoint vocabulary differs from the corpus vocabulary");
    }
  }
  Seq2SeqModel<float> model(ConfigForRun(c, base, static_cast<int>(corpus.vocab.size())), c.seed);
  if (base) LoadParameters(model, *base);

  SamplingOptions sampling{c.cap_per_form, c.seed};
  const auto train = SampleTaskInstances(corpus.train, c.task, sampling);
  const auto validation = SampleTaskInstances(corpus.validation, c.task, sampling);
  const fs::path out = c.out;
  fs::create_directories(out);
  std::ofstream log(out / ("finetune_log-" + std::string(TaskKey(c.task)) + ".tsv"));
  log << "step\tepoch\tloss\tgrad_norm\n";
  FinetuneOptions fo;
  fo.epochs = c.epochs;
  fo.optim = c.ToOptimOptions();
  fo.eval = c.ToEvalOptions();
  fo.seed = c.seed;
  fo.on_step = [&](const TrainLog& l) {
    log << l.step << '\t' << l.epoch << '\t' << l.loss << '\t' << l.grad_norm << '\n';
  };
  const FinetuneResult r = Finetune(model, train, validation, corpus.vocab, fo);
  for (std::size_t e = 0; e < r.validation_scores.size(); ++e) {
    std::cerr << "epoch " << e + 1 << " validation score " << r.validation_scores[e] << "\n";
  }

  const std::string name = "finetune-" + std::string(TaskKey(c.task));
  Checkpoint ckpt = MakeCheckpoint(model, corpus.vocab, (base ? base->step : 0) + static_cast<std::int64_t>(r.losses.size()));
  RecordSwitches(ckpt, c);
  const fs::path ckpt_path = out / (name + ".ckpt");
  SaveCheckpoint(ckpt_path, ckpt);
  c.checkpoint = ckpt_path.string();
  c.Save(out / (name + ".config.txt"));
  if (!validation.empty()) {
    const EvalResult ev = Evaluate(model, validation, corpus.vocab, fo.eval);
    WriteText(out / ("metrics-validation-" + std::string(TaskKey(c.task)) + ".json"),
              MetricsReportJson(ev, c.seed, ckpt_path.string(), c.Hash()));
  }
  std::cout << "fine-tuned on " << train.size() << " samples; checkpoint " << ckpt_path.string() << "\n";
  return kExitOk;
}

int CmdEvaluate(const CommonFlags& f) {
  RunConfig c = ResolveConfig(f);
  const fs::path out = c.out;
  const fs::path ckpt_path = c.checkpoint.empty()
                                 ? out / ("finetune-" + std::string(TaskKey(c.task)) + ".ckpt")
                                 : fs::path(c.checkpoint);
  const Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  if (auto it = ckpt.metadata.find("task"); it == ckpt.metadata.end()) {
    throw Error(ErrorCode::kMissingCheckpoint,
                ckpt_path.string() + " is not fine-tuned for any task");
  } else if (it->second != TaskKey(c.task)) {
    throw Error(ErrorCode::kInvalidArgument,
                ckpt_path.string() + " is fine-tuned for task '" + it->second + "'");
  }
  ApplySwitches(ckpt, c);
  const Corpus corpus = LoadCorpus(c.corpus);
  Seq2SeqModel<float> model(ckpt.config, c.seed);
  LoadParameters(model, ckpt);
  const auto test = SampleTaskInstances(corpus.test, c.task, SamplingOptions{c.cap_per_form, c.seed});
  const EvalResult r = Evaluate(model, test, ckpt.vocab, c.ToEvalOptions());

  const std::string key(TaskKey(c.task));
  WriteText(out / ("metrics-" + key + ".json"), MetricsReportJson(r, c.seed, ckpt_path.string(), c.Hash()));
  std::ofstream pred(out / ("predictions-" + key + ".tsv"));
  pred << "form_id\tblock_index\treference\tprediction\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    pred << test[i].form_id << '\t' << test[i].block_index << '\t' << test[i].target << '\t'
         << r.predictions[i] << '\n';
  }
  c.Save(out / ("evaluate-" + key + ".config.txt"));
  for (const auto& [k, v] : r.metrics) std::cout << k << " " << v << "\n";
  return kExitOk;
}

int CmdAblate(const CommonFlags& f) {
  RunConfig c = ResolveConfig(f);
  const Corpus corpus = LoadCorpus(c.corpus);
  AblationData data{corpus.train, corpus.validation, corpus.test, corpus.vocab, std::nullopt};
  if (!c.checkpoint.empty()) data.pretrained = LoadCheckpoint(c.checkpoint);
  const auto rows = GridRows(c);
  const auto seeds = c.AblationSeeds();
  std::cerr << rows.size() << " settings x " << seeds.size() << " seeds\n";
  const AblationTable table = RunAblation(rows, data, c, seeds,
                                          [](const std::string& row, std::uint64_t seed, const EvalResult& r) {
                                            std::cerr << row << " seed " << seed << ":";
                                            for (const auto& [k, v] : r.metrics) std::cerr << " " << k << "=" << v;
                                            std::cerr << "\n";
                                          });
  const fs::path out = c.out;
  WriteText(out / "ablation.md", table.ToMarkdown());
  WriteText(out / "ablation.json", table.ToJson() + "\n");
  c.Save(out / "ablation.config.txt");
  std::cout << table.ToMarkdown();
  return kExitOk;
}

struct RecommendFlags {
  std::string form;
  int block_index = 0;
  std::string type;
  std::string title;
};

int CmdRecommend(const CommonFlags& f, const RecommendFlags& rf) {
  RunConfig c = ResolveConfig(f);
  const fs::path ckpt_path = c.checkpoint.empty()
                                 ? fs::path(c.out) / ("finetune-" + std::string(TaskKey(c.task)) + ".ckpt")
                                 : fs::path(c.checkpoint);
  const Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  if (auto it = ckpt.metadata.find("task"); it != ckpt.metadata.end() && it->second != TaskKey(c.task)) {
    throw Error(ErrorCode::kInvalidArgument,
                ckpt_path.string() + " is fine-tuned for task '" + it->second + "'");
  }
  ApplySwitches(ckpt, c);
  Form form;
  try {
    form = IngestJson(ReadText(rf.form));
  } catch (const Error& e) {
    throw Error(e.code(), rf.form + ": " + e.message());
  }
  const int n = static_cast<int>(form.blocks.size());
  const int i = rf.block_index > 0 ? rf.block_index : n + 1;
  if (i > n + 1) throw UsageError("--block-index must be at most the block count + 1");

  TaskSample s;
  s.task = c.task;
  s.block_index = i;
  s.context.title = form.title;
  s.context.description = form.description;
  s.context.blocks.assign(form.blocks.begin(), form.blocks.begin() + (i - 1));
  if (i <= n) {
    s.block_type = form.blocks[static_cast<std::size_t>(i - 1)].type;
    s.block_title = form.blocks[static_cast<std::size_t>(i - 1)].title;
  }
  if (!rf.type.empty()) {
    const auto t = ParseBlockType(rf.type);
    if (!t) throw UsageError("unknown block type: " + rf.type);
    s.block_type = *t;
  } else if (i > n && c.task == Task::kQuestionRec) {
    throw UsageError("question recommendation for a new block needs --type");
  }
  if (!rf.title.empty()) s.block_title = NormalizeText(rf.title);
  if (i > n && c.task != Task::kQuestionRec && s.block_title.empty()) {
    throw UsageError("this task needs --title for a new block");
  }

  Seq2SeqModel<float> model(ckpt.config, c.seed);
  LoadParameters(model, ckpt);
  const AnnotatedSequence source = SerializeContext(s, ckpt.vocab, c.ToSerializeOptions());
  if (c.task == Task::kTypeSuggest) {
    const auto logits = ClassifyBlockType(model, source);
    double max = logits[0];
    for (float v : logits) max = std::max(max, static_cast<double>(v));
    double sum = 0.0;
    std::array<double, kNumBlockTypes> p{};
    for (int k = 0; k < kNumBlockTypes; ++k) sum += p[k] = std::exp(logits[k] - max);
    int best = 0;
    for (int k = 0; k < kNumBlockTypes; ++k) {
      p[k] /= sum;
      if (p[k] > p[best]) best = k;
    }
    std::cout << BlockTypeName(BlockTypeFromCode(best)) << "\n";
    for (int k = 0; k < kNumBlockTypes; ++k) {
      std::cout << "  " << BlockTypeName(BlockTypeFromCode(k)) << " " << Percent(100.0 * p[k]) << "%\n";
    }
    return kExitOk;
  }
  DecodeOptions dec{c.beam, c.max_target_len, TargetRole(c.task), i};
  std::cout << ckpt.vocab.Decode(BeamSearch(model, source, dec)) << "\n";
  return kExitOk;
}

// A rendered sequence file: one token per line as `id surface role block`.
// Surfaces decide the ids; the id column is informational.
AnnotatedSequence ReadRenderedSequence(const fs::path& path, Vocab& vocab) {
  std::istringstream in(ReadText(path));
  std::string line;
  std::vector<std::string> surfaces;
  std::vector<TokenAnnotation> annotations;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string id, surface, role;
    int block = 0;
    if (!(ls >> id)) continue;
    if (!(ls >> surface >> role >> block)) {
      throw Error(ErrorCode::kMalformedSequence, path.string() + ":" + std::to_string(line_no) +
                                                     ": expected `id surface role block`");
    }
    const auto r = ParseTokenRole(role);
    if (!r) {
      throw Error(ErrorCode::kMalformedSequence,
                  path.string() + ":" + std::to_string(line_no) + ": unknown role " + role);
    }
    surfaces.push_back(surface);
    annotations.push_back({*r, block});
  }
  const Vocab specials;
  std::vector<std::string> texts;
  for (const auto& s : surfaces) {
    if (!specials.Contains(s)) texts.push_back(s);
  }
  vocab = Vocab::Build(texts, 1);
  AnnotatedSequence seq;
  for (std::size_t k = 0; k < surfaces.size(); ++k) {
    seq.tokens.push_back({vocab.Id(surfaces[k]), annotations[k].role, annotations[k].block_index});
  }
  return seq;
}

int CmdInspect(const std::string& form_path, const std::string& sequence_path) {
  if (form_path.empty() == sequence_path.empty()) {
    throw UsageError("inspect takes exactly one of --form or --sequence");
  }
  if (!sequence_path.empty()) {
    Vocab vocab;
    const AnnotatedSequence seq = ReadRenderedSequence(sequence_path, vocab);
    const Form form = ParseSequence(seq, vocab);
    if (!(SerializeForm(form, vocab) == seq)) {
      std::cout << "round-trip FAILED: reserialized sequence differs\n";
      return kExitDomain;
    }
    std::cout << EmitJson(form) << "\nround-trip OK\n";
    return kExitOk;
  }
  Form form;
  try {
    form = IngestJson(ReadText(form_path));
  } catch (const Error& e) {
    throw Error(e.code(), form_path + ": " + e.message());
  }
  const Vocab vocab = Vocab::Build(CollectTexts(std::vector<Form>{form}), 1);
  const AnnotatedSequence seq = SerializeForm(form, vocab);
  std::cout << RenderSequence(seq, vocab);
  if (!(ParseSequence(seq, vocab) == CanonicalForm(form, vocab))) {
    std::cout << "round-trip FAILED\n";
    return kExitDomain;
  }
  std::cout << "round-trip OK\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-aware form modeling toolkit"};
  app.require_subcommand(1);

  CommonFlags common;
  GenFlags gen;
  std::optional<int> steps, epochs;
  RecommendFlags rec;
  std::string inspect_form, inspect_sequence;

  auto* gen_cmd = app.add_subcommand("gen-corpus", "generate (or ingest) a corpus and split it");
  AddCommonFlags(gen_cmd, common);
  gen_cmd->add_option("--n", gen.n, "number of synthetic forms");
  gen_cmd->add_option("--from", gen.from, "ingest JSON-lines forms instead of generating");

  auto* pre_cmd = app.add_subcommand("pretrain", "denoising pre-training");
  AddCommonFlags(pre_cmd, common);
  AddModelFlags(pre_cmd, common);
  pre_cmd->add_option("--steps", steps, "optimizer steps");

  auto* ft_cmd = app.add_subcommand("finetune", "fine-tune on one task");
  AddCommonFlags(ft_cmd, common);
  AddModelFlags(ft_cmd, common);
  ft_cmd->add_option("--epochs", epochs, "training epochs");

  auto* ev_cmd = app.add_subcommand("evaluate", "score a fine-tuned checkpoint on the test split");
  AddCommonFlags(ev_cmd, common);
  AddModelFlags(ev_cmd, common);

  auto* ab_cmd = app.add_subcommand("ablate", "run an ablation grid over seeds");
  AddCommonFlags(ab_cmd, common);
  AddModelFlags(ab_cmd, common);

  auto* rec_cmd = app.add_subcommand("recommend", "recommend for one block of a form");
  AddCommonFlags(rec_cmd, common);
  AddModelFlags(rec_cmd, common);
  rec_cmd->add_option("--form", rec.form, "form JSON file")->required();
  rec_cmd->add_option("--block-index", rec.block_index, "1-based block to recommend (default: a new block)");
  rec_cmd->add_option("--type", rec.type, "type of the block (question task)");
  rec_cmd->add_option("--title", rec.title, "title of the block (options and type tasks)");

  auto* in_cmd = app.add_subcommand("inspect", "dump a serialization and check the round trip");
  in_cmd->add_option("--form", inspect_form, "form JSON file");
  in_cmd->add_option("--sequence", inspect_sequence, "rendered sequence file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return CmdGenCorpus(common, gen);
    if (*pre_cmd) return CmdPretrain(common, steps);
    if (*ft_cmd) return CmdFinetune(common, epochs);
    if (*ev_cmd) return CmdEvaluate(common);
    if (*ab_cmd) return CmdAblate(common);
    if (*rec_cmd) return CmdRecommend(common, rec);
    if (*in_cmd) return CmdInspect(inspect_form, inspect_sequence);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
