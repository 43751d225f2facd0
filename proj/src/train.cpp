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

#include "formstruct/train.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "formstruct/error.hpp"
#include "formstruct/metrics.hpp"
#include "formstruct/objectives.hpp"

namespace formstruct {

namespace {

// One optimizer step over a batch. `example_loss` records the loss of one
// example on the tape, already scaled to its share of the batch mean.
template <typename T, typename Fn>
TrainLog RunStep(Seq2SeqModel<T>& model, AdamW<T>& optimizer, const OptimOptions& options,
                 Rng& dropout_rng, std::size_t batch_size, Fn&& example_loss) {
  model.ZeroGrad();
  double loss = 0.0;
  for (std::size_t b = 0; b < batch_size; ++b) {
    nn::Tape<T> tape(&dropout_rng, model.config().dropout);
    const nn::Var l = example_loss(tape, b);
    loss += static_cast<double>(tape.value(l)(0, 0));
    tape.Backward(l);
  }
  TrainLog log;
  log.loss = loss;
  const auto& params = model.parameters();
  log.grad_norm = options.clip_norm > 0.0
                      ? ClipGradNorm<T>(std::span<nn::Parameter<T>* const>(params), options.clip_norm)
                      : 0.0;
  optimizer.Step();
  log.step = optimizer.step();
  return log;
}

// Cycles through a shuffled index order, reshuffling at each epoch boundary.
class EpochSampler {
 public:
  EpochSampler(std::size_t n, Rng& rng) : order_(n), rng_(rng) {
    std::iota(order_.begin(), order_.end(), 0);
    rng_.Shuffle(order_);
  }
  std::size_t Next() {
    if (pos_ == order_.size()) {
      rng_.Shuffle(order_);
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  std::vector<std::size_t> order_;
  Rng& rng_;
  std::size_t pos_ = 0;
};

void CheckOptim(const OptimOptions& options) {
  if (options.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
}

}  // namespace

template <typename T>
PretrainResult Pretrain(Seq2SeqModel<T>& model, std::span<const FormRecord> forms, const Vocab& vocab,
                        const PretrainOptions& options) {
  CheckOptim(options.optim);
  PretrainResult result;
  if (options.steps <= 0) return result;
  const ModelConfig& cfg = model.config();

  std::vector<const FormRecord*> usable;
  for (const auto& r : forms) {
    const std::size_t len = SerializeForm(r.form, vocab).size();
    if (len <= static_cast<std::size_t>(cfg.max_source_len) &&
        len + 1 <= static_cast<std::size_t>(cfg.decoder_positions())) {
      usable.push_back(&r);
    } else {
      ++result.skipped_forms;
    }
  }
  if (usable.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training form fits the model's positions");

  Rng data_rng(MixSeed(options.seed, 1));
  Rng dropout_rng(MixSeed(options.seed, 2));
  EpochSampler sampler(usable.size(), data_rng);
  AdamW<T> optimizer(model.parameters(), options.optim.adamw);
  const auto batch = static_cast<std::size_t>(options.optim.batch_size);

  for (int step = 0; step < options.steps; ++step) {
    struct Prepared {
      std::vector<TokenId> enc_ids, dec_in, dec_out;
      std::vector<TokenAnnotation> enc_ann, dec_ann;
    };
    std::vector<Prepared> prepared;
    std::size_t total_tokens = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      const FormRecord& r = *usable[sampler.Next()];
      DenoisingExample ex = BuildDenoisingExample(r.form, vocab, data_rng, options.mask_budget);
      const AnnotatedSequence intact = SerializeForm(r.form, vocab);
      Prepared p;
      p.enc_ids = ex.corrupted.ids();
      p.enc_ann = ex.corrupted.annotations();
      p.dec_in.push_back(kBos);
      p.dec_in.insert(p.dec_in.end(), ex.target.begin(), ex.target.end());
      p.dec_out = ex.target;
      p.dec_out.push_back(kEos);
      p.dec_ann = intact.annotations();
      p.dec_ann.push_back({TokenRole::kSep, p.dec_ann.back().block_index});
      total_tokens += p.dec_out.size();
      prepared.push_back(std::move(p));
    }
    TrainLog log = RunStep(model, optimizer, options.optim, dropout_rng, batch,
                           [&](nn::Tape<T>& tape, std::size_t b) {
                             const Prepared& p = prepared[b];
                             const nn::Var mem = model.Encode(tape, p.enc_ids, p.enc_ann);
                             const nn::Var h = model.Decode(tape, mem, p.enc_ann, p.dec_in, p.dec_ann);
                             return ReconstructionLoss<T>(tape, model.LmLogits(tape, h), p.dec_out,
                                                          kPad, total_tokens);
                           });
    result.losses.push_back(log.loss);
    if (options.on_step) options.on_step(log);
  }
  return result;
}

TokenRole TargetRole(Task task) {
  switch (task) {
    case Task::kQuestionRec:
      return TokenRole::kBlockTitle;
    case Task::kOptionsRec:
      return TokenRole::kOption;
    case Task::kTypeSuggest:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "type suggestion has no generation target");
}

EncodedSample EncodeSample(const TaskSample& sample, const Vocab& vocab,
                           const SerializeOptions& serialize, int max_target_len) {
  EncodedSample out;
  out.source = SerializeContext(sample, vocab, serialize);
  out.block_type = sample.block_type;
  if (!IsGenerationTask(sample.task)) return out;
  if (max_target_len < 1) throw Error(ErrorCode::kInvalidArgument, "max_target_len must be positive");
  std::vector<TokenId> target = vocab.Encode(sample.target);
  if (target.size() > static_cast<std::size_t>(max_target_len - 1)) {
    target.resize(static_cast<std::size_t>(max_target_len - 1));
  }
  target.push_back(kEos);
  out.decoder_input.push_back(kBos);
  out.decoder_input.insert(out.decoder_input.end(), target.begin(), target.end() - 1);
  out.decoder_annotations = TargetAnnotations(TargetRole(sample.task), sample.block_index, target.size());
  out.decoder_target = std::move(target);
  return out;
}

double SelectionScore(const EvalResult& result) {
  return result.metrics.at(IsGenerationTask(result.task) ? "rouge2" : "macro_f1");
}

std::string MetricsReportJson(const EvalResult& result, std::uint64_t seed,
                              const std::string& checkpoint_path, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["task"] = std::string(TaskKey(result.task));
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.metrics) j["metrics"][k] = v;
  j["n_samples"] = result.n_samples;
  j["seed"] = seed;
  j["checkpoint_path"] = checkpoint_path;
  j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

template <typename T>
EvalResult Evaluate(Seq2SeqModel<T>& model, std::span<const TaskSample> samples, const Vocab& vocab,
                    const EvalOptions& options) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no samples to evaluate");
  EvalResult result;
  result.task = samples.front().task;
  result.n_samples = samples.size();
  if (IsGenerationTask(result.task)) {
    double r1 = 0.0, r2 = 0.0, rl = 0.0;
    for (const auto& s : samples) {
      const AnnotatedSequence source = SerializeContext(s, vocab, options.serialize);
      DecodeOptions dec{options.beam, options.max_target_len, TargetRole(s.task), s.block_index};
      const std::string text = vocab.Decode(BeamSearch(model, source, dec));
      const RougeScores sc = Rouge(text, s.target);
      r1 += sc.rouge1;
      r2 += sc.rouge2;
      rl += sc.rougeL;
      result.predictions.push_back(text);
    }
    const double n = static_cast<double>(samples.size());
    result.metrics = {{"rouge1", r1 / n}, {"rouge2", r2 / n}, {"rougeL", rl / n}};
  } else {
    std::vector<BlockType> preds, golds;
    for (const auto& s : samples) {
      const AnnotatedSequence source = SerializeContext(s, vocab, options.serialize);
      const auto logits = ClassifyBlockType(model, source);
      const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
      preds.push_back(BlockTypeFromCode(static_cast<int>(best)));
      golds.push_back(s.block_type);
      result.predictions.emplace_back(BlockTypeName(preds.back()));
    }
    const ClassificationScores sc = ClassificationMetrics(preds, golds);
    result.metrics = {{"macro_f1", sc.macro_f1}, {"accuracy", sc.accuracy}};
  }
  return result;
}

template <typename T>
FinetuneResult Finetune(Seq2SeqModel<T>& model, std::span<const TaskSample> train,
                        std::span<const TaskSample> validation, const Vocab& vocab,
                        const FinetuneOptions& options) {
  CheckOptim(options.optim);
  FinetuneResult result;
  if (options.epochs <= 0 || train.empty()) return result;
  const Task task = train.front().task;
  for (const auto& s : train) {
    if (s.task != task) throw Error(ErrorCode::kInvalidArgument, "fine-tuning samples mix tasks");
  }
  std::vector<EncodedSample> encoded;
  encoded.reserve(train.size());
  for (const auto& s : train) {
    encoded.push_back(EncodeSample(s, vocab, options.eval.serialize, options.eval.max_target_len));
  }

  Rng order_rng(MixSeed(options.seed, 3));
  Rng dropout_rng(MixSeed(options.seed, 4));
  AdamW<T> optimizer(model.parameters(), options.optim.adamw);
  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(options.optim.batch_size);
  const bool generation = IsGenerationTask(task);
  std::vector<Matrix<T>> best_weights;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    order_rng.Shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      std::size_t total_tokens = 0;
      for (std::size_t b = 0; b < n; ++b) total_tokens += encoded[order[start + b]].decoder_target.size();
      TrainLog log = RunStep(model, optimizer, options.optim, dropout_rng, n,
                             [&](nn::Tape<T>& tape, std::size_t b) {
                               const EncodedSample& e = encoded[order[start + b]];
                               const auto ids = e.source.ids();
                               const auto ann = e.source.annotations();
                               const nn::Var mem = model.Encode(tape, ids, ann);
                               if (generation) {
                                 const nn::Var h = model.Decode(tape, mem, ann, e.decoder_input,
                                                                e.decoder_annotations);
                                 return ReconstructionLoss<T>(tape, model.LmLogits(tape, h),
                                                              e.decoder_target, kPad, total_tokens);
                               }
                               const nn::Var h = model.Decode(tape, mem, ann, ids, ann);
                               const int gold = BlockTypeCode(e.block_type);
                               return nn::CrossEntropy<T>(tape, model.ClassLogits(tape, h),
                                                          std::span<const int>(&gold, 1), -1,
                                                          T(1) / static_cast<T>(n));
                             });
      log.epoch = epoch;
      result.losses.push_back(log.loss);
      if (options.on_step) options.on_step(log);
    }
    if (!validation.empty()) {
      const double score = SelectionScore(Evaluate(model, validation, vocab, options.eval));
      result.validation_scores.push_back(score);
      if (result.best_epoch < 0 || score > result.best_score) {
        result.best_epoch = epoch;
        result.best_score = score;
        best_weights = model.Snapshot();
      }
    }
  }
  if (!best_weights.empty()) model.Restore(best_weights);
  return result;
}

template PretrainResult Pretrain(Seq2SeqModel<float>&, std::span<const FormRecord>, const Vocab&,
                                 const PretrainOptions&);
template PretrainResult Pretrain(Seq2SeqModel<double>&, std::span<const FormRecord>, const Vocab&,
                                 const PretrainOptions&);
template EvalResult Evaluate(Seq2SeqModel<float>&, std::span<const TaskSample>, const Vocab&,
                             const EvalOptions&);
template EvalResult Evaluate(Seq2SeqModel<double>&, std::span<const TaskSample>, const Vocab&,
                             const EvalOptions&);
template FinetuneResult Finetune(Seq2SeqModel<float>&, std::span<const TaskSample>,
                                 std::span<const TaskSample>, const Vocab&, const FinetuneOptions&);
template FinetuneResult Finetune(Seq2SeqModel<double>&, std::span<const TaskSample>,
                                 std::span<const TaskSample>, const Vocab&, const FinetuneOptions&);

}  // namespace formstruct
