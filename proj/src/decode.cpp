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

#include "formstruct/decode.hpp"

#include <algorithm>
#include <cmath>

#include "formstruct/error.hpp"

namespace formstruct {

template <typename T>
IncrementalDecoder<T>::IncrementalDecoder(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                          TokenRole role, int block_index)
    : model_(model), memory_annotations_(source.annotations()), role_(role), block_index_(block_index) {
  nn::Tape<T> tape;
  const auto ids = source.ids();
  memory_ = tape.value(model_.Encode(tape, ids, memory_annotations_));
}

template <typename T>
std::vector<double> IncrementalDecoder<T>::NextLogProbs(const std::vector<TokenId>& prefix) {
  std::vector<TokenId> input;
  input.reserve(prefix.size() + 1);
  input.push_back(kBos);
  input.insert(input.end(), prefix.begin(), prefix.end());
  const auto annotations = TargetAnnotations(role_, block_index_, input.size());
  nn::Tape<T> tape;
  const nn::Var memory = tape.Constant(memory_);
  const nn::Var h = model_.Decode(tape, memory, memory_annotations_, input, annotations);
  const nn::Var last = nn::SelectRow<T>(tape, h, static_cast<int>(input.size()) - 1);
  const Matrix<T>& logits = tape.value(model_.LmLogits(tape, last));
  const double max = static_cast<double>(logits.maxCoeff());
  double sum = 0.0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) sum += std::exp(static_cast<double>(logits(0, j)) - max);
  const double lse = max + std::log(sum);
  std::vector<double> out(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    out[static_cast<std::size_t>(j)] = static_cast<double>(logits(0, j)) - lse;
  }
  return out;
}

namespace {

template <typename T>
int EffectiveMaxLen(const Seq2SeqModel<T>& model, const DecodeOptions& options) {
  if (options.max_len < 1) throw Error(ErrorCode::kInvalidArgument, "max_len must be positive");
  if (options.beam < 1) throw Error(ErrorCode::kInvalidArgument, "beam must be positive");
  return std::min(options.max_len, model.config().decoder_positions());
}

std::vector<TokenId> StripEos(std::vector<TokenId> ids) {
  if (!ids.empty() && ids.back() == kEos) ids.pop_back();
  return ids;
}

}  // namespace

template <typename T>
std::vector<TokenId> GreedyDecode(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                  const DecodeOptions& options) {
  const int max_len = EffectiveMaxLen(model, options);
  IncrementalDecoder<T> dec(model, source, options.role, options.block_index);
  std::vector<TokenId> out;
  double total = 0.0;
  while (static_cast<int>(out.size()) < max_len) {
    const auto lp = dec.NextLogProbs(out);
    // Compared on running totals, exactly as the beam ranks candidates.
    TokenId best = 0;
    double best_total = total + lp[0];
    for (std::size_t tok = 1; tok < lp.size(); ++tok) {
      if (total + lp[tok] > best_total) {
        best_total = total + lp[tok];
        best = static_cast<TokenId>(tok);
      }
    }
    total = best_total;
    out.push_back(best);
    if (best == kEos) break;
  }
  return StripEos(std::move(out));
}

template <typename T>
std::vector<Hypothesis> BeamSearchHypotheses(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                             const DecodeOptions& options) {
  const int max_len = EffectiveMaxLen(model, options);
  const auto width = static_cast<std::size_t>(options.beam);
  IncrementalDecoder<T> dec(model, source, options.role, options.block_index);

  struct Candidate {
    double log_prob;
    std::size_t parent;
    TokenId token;
  };
  std::vector<Hypothesis> live{Hypothesis{}};
  std::vector<Hypothesis> finished;
  for (int step = 0; step < max_len && !live.empty() && finished.size() < width; ++step) {
    std::vector<Candidate> cands;
    for (std::size_t b = 0; b < live.size(); ++b) {
      const auto lp = dec.NextLogProbs(live[b].ids);
      for (std::size_t tok = 0; tok < lp.size(); ++tok) {
        cands.push_back({live[b].log_prob + lp[tok], b, static_cast<TokenId>(tok)});
      }
    }
    const std::size_t keep = std::min(cands.size(), 2 * width);
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Hypothesis> next;
    for (std::size_t r = 0; r < keep && next.size() < width; ++r) {
      Hypothesis h = live[cands[r].parent];
      h.ids.push_back(cands[r].token);
      h.log_prob = cands[r].log_prob;
      if (cands[r].token == kEos) {
        // Only top-ranked completions count, as in standard beam search.
        if (r < width) {
          h.finished = true;
          finished.push_back(std::move(h));
        }
      } else {
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }
  if (finished.size() < width) {
    for (auto& h : live) finished.push_back(std::move(h));
  }
  return finished;
}

template <typename T>
std::vector<TokenId> BeamSearch(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                const DecodeOptions& options) {
  const auto hyps = BeamSearchHypotheses(model, source, options);
  const Hypothesis* best = nullptr;
  for (const auto& h : hyps) {
    if (best == nullptr || h.score() > best->score()) best = &h;
  }
  return best == nullptr ? std::vector<TokenId>{} : StripEos(best->ids);
}

template class IncrementalDecoder<float>;
template class IncrementalDecoder<double>;
template std::vector<TokenId> GreedyDecode(Seq2SeqModel<float>&, const AnnotatedSequence&, const DecodeOptions&);
template std::vector<TokenId> GreedyDecode(Seq2SeqModel<double>&, const AnnotatedSequence&, const DecodeOptions&);
template std::vector<TokenId> BeamSearch(Seq2SeqModel<float>&, const AnnotatedSequence&, const DecodeOptions&);
template std::vector<TokenId> BeamSearch(Seq2SeqModel<double>&, const AnnotatedSequence&, const DecodeOptions&);
template std::vector<Hypothesis> BeamSearchHypotheses(Seq2SeqModel<float>&, const AnnotatedSequence&,
                                                      const DecodeOptions&);
template std::vector<Hypothesis> BeamSearchHypotheses(Seq2SeqModel<double>&, const AnnotatedSequence&,
                                                      const DecodeOptions&);

}  // namespace formstruct
