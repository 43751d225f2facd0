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

#ifndef FORMSTRUCT_DECODE_HPP_
#define FORMSTRUCT_DECODE_HPP_

#include <vector>

#include "formstruct/model.hpp"

namespace formstruct {

struct DecodeOptions {
  int beam = 5;
  // Generated tokens per hypothesis, counting the closing </s>.
  int max_len = 64;
  TokenRole role = TokenRole::kBlockTitle;
  int block_index = 1;
};

struct Hypothesis {
  std::vector<TokenId> ids;  // without <s>; ends with </s> when finished
  double log_prob = 0.0;
  bool finished = false;

  double score() const { return ids.empty() ? log_prob : log_prob / static_cast<double>(ids.size()); }
};

// Caches the encoder output for one source and scores next tokens.
template <typename T>
class IncrementalDecoder {
 public:
  IncrementalDecoder(Seq2SeqModel<T>& model, const AnnotatedSequence& source, TokenRole role,
                     int block_index);
  // Log-softmax over the vocabulary for the token after <s> + prefix.
  std::vector<double> NextLogProbs(const std::vector<TokenId>& prefix);

 private:
  Seq2SeqModel<T>& model_;
  Matrix<T> memory_;
  std::vector<TokenAnnotation> memory_annotations_;
  TokenRole role_;
  int block_index_;
};

// Argmax each step, lowest id on ties. Output excludes <s> and </s>.
template <typename T>
std::vector<TokenId> GreedyDecode(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                  const DecodeOptions& options);

// Length-normalized beam search. Candidates at one step rank by summed log
// probability, then by parent rank, then by smaller token id; finished
// hypotheses rank by log probability per token. Output excludes <s>/</s>.
template <typename T>
std::vector<TokenId> BeamSearch(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                const DecodeOptions& options);

// All finished hypotheses in the order they were completed.
template <typename T>
std::vector<Hypothesis> BeamSearchHypotheses(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                                             const DecodeOptions& options);

}  // namespace formstruct

#endif  // FORMSTRUCT_DECODE_HPP_
