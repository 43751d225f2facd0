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

#include "formstruct/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "formstruct/error.hpp"

namespace formstruct {

BtpResult ApplyBtp(const Form& form, Rng& rng) {
  BtpResult out{form, std::vector<int>(form.blocks.size())};
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  if (form.blocks.size() < 2) return out;
  rng.Shuffle(out.permutation);
  for (std::size_t j = 0; j < form.blocks.size(); ++j) {
    out.form.blocks[static_cast<std::size_t>(out.permutation[j])].title = form.blocks[j].title;
  }
  return out;
}

Form InvertBtp(const Form& permuted, std::span<const int> permutation) {
  if (permutation.size() != permuted.blocks.size()) {
    throw Error(ErrorCode::kInvalidArgument, "permutation does not cover the blocks");
  }
  Form out = permuted;
  for (std::size_t j = 0; j < permutation.size(); ++j) {
    out.blocks[j].title = permuted.blocks.at(static_cast<std::size_t>(permutation[j])).title;
  }
  return out;
}

namespace {

bool IsContent(const AnnotatedToken& t) {
  return t.role != TokenRole::kBlockType && t.role != TokenRole::kSep && t.id != kSep &&
         t.id != kBar && !IsTypeToken(t.id) && t.id != kTypePlaceholder;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> MaskableNodes(const AnnotatedSequence& seq) {
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  const auto& tok = seq.tokens;
  std::size_t i = 0;
  while (i < tok.size()) {
    if (!IsContent(tok[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tok.size() && IsContent(tok[j]) && tok[j].role == tok[i].role &&
           tok[j].block_index == tok[i].block_index) {
      ++j;
    }
    nodes.emplace_back(i, j);
    i = j;
  }
  return nodes;
}

SpanMlmResult ApplySpanMlm(const AnnotatedSequence& seq, std::size_t vocab_size, Rng& rng,
                           double budget) {
  SpanMlmResult out;
  out.ids = seq.ids();
  auto nodes = MaskableNodes(seq);
  rng.Shuffle(nodes);
  const double target = budget * static_cast<double>(seq.size());
  std::size_t masked = 0;
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (const auto& node : nodes) {
    if (static_cast<double>(masked) >= target) break;
    chosen.push_back(node);
    masked += node.second - node.first;
  }
  std::sort(chosen.begin(), chosen.end());

  const bool has_corpus = vocab_size > static_cast<std::size_t>(kFirstCorpusToken);
  for (const auto& [start, end] : chosen) {
    MaskedSpan span{start, end, {}, {}};
    for (std::size_t p = start; p < end; ++p) {
      span.original.push_back(out.ids[p]);
      const double u = rng.Uniform();
      MaskAction action = u < 0.8 ? MaskAction::kMask : (u < 0.9 ? MaskAction::kRandom : MaskAction::kKeep);
      if (action == MaskAction::kMask) {
        out.ids[p] = kMask;
      } else if (action == MaskAction::kRandom) {
        out.ids[p] = has_corpus ? static_cast<TokenId>(kFirstCorpusToken +
                                                       rng.UniformInt(vocab_size - kFirstCorpusToken))
                                : kMask;
      }
      span.actions.push_back(action);
    }
    out.record.spans.push_back(std::move(span));
  }
  return out;
}

std::vector<TokenId> RestoreIds(std::span<const TokenId> corrupted, const CorruptionRecord& record) {
  std::vector<TokenId> ids(corrupted.begin(), corrupted.end());
  for (const auto& span : record.spans) {
    if (span.end > ids.size() || span.end - span.start != span.original.size()) {
      throw Error(ErrorCode::kInvalidArgument, "corruption record does not fit the sequence");
    }
    std::copy(span.original.begin(), span.original.end(), ids.begin() + static_cast<std::ptrdiff_t>(span.start));
  }
  return ids;
}

DenoisingExample BuildDenoisingExample(const Form& form, const Vocab& vocab, Rng& rng,
                                       double budget) {
  DenoisingExample ex;
  ex.target = SerializeForm(form, vocab).ids();
  BtpResult btp = ApplyBtp(form, rng);
  ex.corrupted = SerializeForm(btp.form, vocab);
  SpanMlmResult mlm = ApplySpanMlm(ex.corrupted, vocab.size(), rng, budget);
  for (std::size_t i = 0; i < mlm.ids.size(); ++i) ex.corrupted.tokens[i].id = mlm.ids[i];
  ex.record = std::move(mlm.record);
  ex.record.permutation = std::move(btp.permutation);
  return ex;
}

std::size_t CountNonPad(std::span<const TokenId> targets, TokenId pad) {
  return static_cast<std::size_t>(std::count_if(targets.begin(), targets.end(),
                                                [pad](TokenId t) { return t != pad; }));
}

template <typename T>
T ReconstructionLoss(const Matrix<T>& logits, std::span<const TokenId> targets, TokenId pad) {
  if (static_cast<Eigen::Index>(targets.size()) != logits.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "one target per logits row required");
  }
  const std::size_t n = CountNonPad(targets, pad);
  if (n == 0) throw Error(ErrorCode::kEmptyLossSupport, "every target position is padding");
  T total = T(0);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const TokenId target = targets[static_cast<std::size_t>(i)];
    if (target == pad) continue;
    if (target < 0 || target >= logits.cols()) {
      throw Error(ErrorCode::kInvalidTokenId, "target " + std::to_string(target));
    }
    const T max = logits.row(i).maxCoeff();
    const T lse = max + std::log((logits.row(i).array() - max).exp().sum());
    total += lse - logits(i, target);
  }
  return total / static_cast<T>(n);
}

template <typename T>
nn::Var ReconstructionLoss(nn::Tape<T>& tape, nn::Var logits, std::span<const TokenId> targets,
                           TokenId pad, std::size_t denominator) {
  const std::size_t n = denominator != 0 ? denominator : CountNonPad(targets, pad);
  if (n == 0 || CountNonPad(targets, pad) == 0) {
    throw Error(ErrorCode::kEmptyLossSupport, "every target position is padding");
  }
  return nn::CrossEntropy<T>(tape, logits, targets, pad, T(1) / static_cast<T>(n));
}

template float ReconstructionLoss(const Matrix<float>&, std::span<const TokenId>, TokenId);
template double ReconstructionLoss(const Matrix<double>&, std::span<const TokenId>, TokenId);
template nn::Var ReconstructionLoss(nn::Tape<float>&, nn::Var, std::span<const TokenId>, TokenId,
                                    std::size_t);
template nn::Var ReconstructionLoss(nn::Tape<double>&, nn::Var, std::span<const TokenId>, TokenId,
                                    std::size_t);

}  // namespace formstruct
