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

#ifndef FORMSTRUCT_SERIALIZER_HPP_
#define FORMSTRUCT_SERIALIZER_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "formstruct/annotation.hpp"
#include "formstruct/form.hpp"
#include "formstruct/task.hpp"
#include "formstruct/tokenizer.hpp"

namespace formstruct {

struct AnnotatedToken {
  TokenId id = kPad;
  TokenRole role = TokenRole::kSep;
  int block_index = kTitleBlock;

  TokenAnnotation annotation() const { return {role, block_index}; }
  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

struct AnnotatedSequence {
  std::vector<AnnotatedToken> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::vector<TokenId> ids() const;
  std::vector<TokenAnnotation> annotations() const;

  friend bool operator==(const AnnotatedSequence&, const AnnotatedSequence&) = default;
};

enum class ContextMode { kFull, kLastTitle };

struct SerializeOptions {
  std::size_t max_source_len = 512;
  // Replace every block type token with the neutral "<type>" placeholder.
  bool type_tokens = true;
  // Concatenate the NL text only: no type tokens, separators or bars (the
  // task's own Type_i token is still appended for question recommendation).
  bool plain = false;
  ContextMode context = ContextMode::kFull;
};

// Flattens a form. Grammar (one line per node kind):
//   form   := title <sep> desc block+
//   block  := TYPE title <sep> desc [<sep> items]          Choice / Rating
//           | TYPE title <sep> desc <sep> items <sep> items  Likert
//           | TYPE title <sep> desc                          other types
//   items  := text ("|" text)*   (may be empty for Choice / Rating)
// Description slots are always present, possibly with zero tokens.
AnnotatedSequence SerializeForm(const Form& form, const Vocab& vocab);

// Inverse of SerializeForm on the token ids alone; the roles and block
// indices derived while parsing must match the carried annotations.
// Throws MalformedSequence / AnnotationMismatch.
Form ParseSequence(const AnnotatedSequence& seq, const Vocab& vocab);

// Task input for block B_i. Oldest whole blocks are dropped first to fit
// `max_source_len`, then the form description; the form title and the
// appended task item are always kept (ContextOverflow otherwise).
AnnotatedSequence SerializeContext(const TaskSample& sample, const Vocab& vocab,
                                   const SerializeOptions& options = {});

// Text fields mapped through decode(encode(.)); the round-trip fixed point.
Form CanonicalForm(const Form& form, const Vocab& vocab);

// One token per line: `id  surface  role  block_index`.
std::string RenderSequence(const AnnotatedSequence& seq, const Vocab& vocab);

}  // namespace formstruct

#endif  // FORMSTRUCT_SERIALIZER_HPP_
