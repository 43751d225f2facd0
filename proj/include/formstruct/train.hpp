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

#ifndef FORMSTRUCT_TRAIN_HPP_
#define FORMSTRUCT_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "formstruct/corpus.hpp"
#include "formstruct/decode.hpp"
#include "formstruct/model.hpp"
#include "formstruct/optim.hpp"
#include "formstruct/serializer.hpp"
#include "formstruct/task.hpp"

namespace formstruct {

struct TrainLog {
  std::int64_t step = 0;
  int epoch = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};
using StepCallback = std::function<void(const TrainLog&)>;

struct OptimOptions {
  AdamWOptions adamw;
  double clip_norm = 1.0;  // <= 0 disables clipping
  int batch_size = 32;
};

struct PretrainOptions {
  int steps = 0;
  OptimOptions optim;
  double mask_budget = 0.15;
  std::uint64_t seed = 0;
  StepCallback on_step;
};

struct PretrainResult {
  std::vector<double> losses;  // one per step
  std::size_t skipped_forms = 0;  // longer than the model's positions
};

// Denoising pre-training: each step draws `batch_size` training forms (an
// epoch-wise shuffle), corrupts them with BTP + SpanMLM, and minimizes the
// batch-mean token cross-entropy of reconstructing the intact form.
template <typename T>
PretrainResult Pretrain(Seq2SeqModel<T>& model, std::span<const FormRecord> forms, const Vocab& vocab,
                        const PretrainOptions& options);

// A task sample prepared for the model.
struct EncodedSample {
  AnnotatedSequence source;
  std::vector<TokenId> decoder_input;   // <s> + target[:-1]
  std::vector<TokenId> decoder_target;  // target tokens + </s>
  std::vector<TokenAnnotation> decoder_annotations;
  BlockType block_type = BlockType::kTextField;
};

// Expected output role for a generation task.
TokenRole TargetRole(Task task);

EncodedSample EncodeSample(const TaskSample& sample, const Vocab& vocab,
                           const SerializeOptions& serialize, int max_target_len);

struct EvalOptions {
  SerializeOptions serialize;
  int beam = 5;
  int max_target_len = 64;
};

struct EvalResult {
  Task task = Task::kQuestionRec;
  // rouge1/rouge2/rougeL (percent) or macro_f1/accuracy (fractions).
  std::map<std::string, double> metrics;
  std::vector<std::string> predictions;
  std::size_t n_samples = 0;
};

// Throws EmptyInput for an empty sample list.
template <typename T>
EvalResult Evaluate(Seq2SeqModel<T>& model, std::span<const TaskSample> samples, const Vocab& vocab,
                    const EvalOptions& options);

// ROUGE-2 for generation tasks, Macro-F1 for type suggestion.
double SelectionScore(const EvalResult& result);

// {task, metrics{...}, n_samples, seed, checkpoint_path, config_hash}
std::string MetricsReportJson(const EvalResult& result, std::uint64_t seed,
                              const std::string& checkpoint_path, const std::string& config_hash);

struct FinetuneOptions {
  int epochs = 5;
  OptimOptions optim;
  EvalOptions eval;
  std::uint64_t seed = 0;
  StepCallback on_step;
};

struct FinetuneResult {
  std::vector<double> losses;             // per step
  std::vector<double> validation_scores;  // per epoch
  int best_epoch = -1;                    // -1: no validation, last weights kept
  double best_score = 0.0;
};

// All samples must share one task. With validation samples the weights of
// the best epoch are restored at the end.
template <typename T>
FinetuneResult Finetune(Seq2SeqModel<T>& model, std::span<const TaskSample> train,
                        std::span<const TaskSample> validation, const Vocab& vocab,
                        const FinetuneOptions& options);

}  // namespace formstruct

#endif  // FORMSTRUCT_TRAIN_HPP_
