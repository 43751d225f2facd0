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

#ifndef FORMSTRUCT_OBJECTIVES_HPP_
#define FORMSTRUCT_OBJECTIVES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "formstruct/autograd.hpp"
#include "formstruct/form.hpp"
#include "formstruct/rng.hpp"
#include "formstruct/serializer.hpp"
#include "formstruct/tokenizer.hpp"

namespace formstruct {

enum class MaskAction { kMask, kRandom, kKeep };

// A masked node: tokens [start, end) of the serialized sequence.
struct MaskedSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<TokenId> original;
  std::vector<MaskAction> actions;  // one per token
};

struct CorruptionRecord {
  std::vector<MaskedSpan> spans;  // sorted by start, non-overlapping
  // permutation[j] = k: the title of block j+1 now sits on block k+1.
  std::vector<int> permutation;
};

struct BtpResult {
  Form form;
  std::vector<int> permutation;
};

// Block Title Permutation: shuffles the titles over the blocks; every other
// field stays with its block.
BtpResult ApplyBtp(const Form& form, Rng& rng);
Form InvertBtp(const Form& permuted, std::span<const int> permutation);

// Content nodes of a serialized form: maximal runs of text tokens sharing a
// role and block index. Type tokens, separators and bars are never inside.
std::vector<std::pair<std::size_t, std::size_t>> MaskableNodes(const AnnotatedSequence& seq);

struct SpanMlmResult {
  std::vector<TokenId> ids;
  CorruptionRecord record;  // permutation left empty
};

// Whole-node masking. Nodes are drawn uniformly without replacement while
// the masked token count is below budget * len; each selected token becomes
// <mask> (0.8), a random corpus token (0.1) or stays (0.1).
SpanMlmResult ApplySpanMlm(const AnnotatedSequence& seq, std::size_t vocab_size, Rng& rng,
                           double budget = 0.15);

// Undoes the masking recorded in `record`.
std::vector<TokenId> RestoreIds(std::span<const TokenId> corrupted, const CorruptionRecord& record);

struct DenoisingExample {
  AnnotatedSequence corrupted;
  std::vector<TokenId> target;  // SerializeForm(original).ids()
  CorruptionRecord record;
};

// BTP on the tree, then serialization, then SpanMLM on the tokens.
DenoisingExample BuildDenoisingExample(const Form& form, const Vocab& vocab, Rng& rng,
                                       double budget = 0.15);

// Mean token cross-entropy over positions whose target is not `pad`.
// Throws EmptyLossSupport when every position is padding.
template <typename T>
T ReconstructionLoss(const Matrix<T>& logits, std::span<const TokenId> targets, TokenId pad = kPad);

// Same quantity recorded on a tape; `denominator` overrides the per-call
// token count so several examples can share one batch mean.
template <typename T>
nn::Var ReconstructionLoss(nn::Tape<T>& tape, nn::Var logits, std::span<const TokenId> targets,
                           TokenId pad = kPad, std::size_t denominator = 0);

std::size_t CountNonPad(std::span<const TokenId> targets, TokenId pad = kPad);

}  // namespace formstruct

#endif  // FORMSTRUCT_OBJECTIVES_HPP_
