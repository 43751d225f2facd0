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

#include "formstruct/serializer.hpp"

#include <array>
#include <iomanip>
#include <sstream>

#include "formstruct/error.hpp"

namespace formstruct {
namespace {

constexpr std::array<std::string_view, kNumTokenRoles> kRoleNames = {
    "FormTitle", "FormDesc",     "BlockTitle", "BlockDesc", "Option",
    "LikertRow", "LikertColumn", "BlockType",  "SepToken"};

bool IsContent(TokenId id) {
  return id == kUnk || id == kMask || id >= kFirstCorpusToken;
}

class Emitter {
 public:
  Emitter(const Vocab& vocab, const SerializeOptions& options)
      : vocab_(vocab), options_(options) {}

  void Text(const std::string& text, TokenRole role, int block) {
    for (TokenId id : vocab_.Encode(text)) out_.push_back({id, role, block});
  }
  void Sep(int block) {
    if (!options_.plain) out_.push_back({kSep, TokenRole::kSep, block});
  }
  void Type(BlockType type, int block, bool force = false) {
    if (options_.plain && !force) return;
    out_.push_back({options_.type_tokens ? TypeToken(type) : kTypePlaceholder,
                    TokenRole::kBlockType, block});
  }
  void Items(const std::vector<std::string>& items, TokenRole role, int block) {
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (k > 0 && !options_.plain) out_.push_back({kBar, TokenRole::kSep, block});
      Text(items[k], role, block);
    }
  }

  void Header(const Form& form, bool with_description) {
    Text(form.title, TokenRole::kFormTitle, kTitleBlock);
    Sep(kTitleBlock);
    if (with_description && form.description) {
      Text(*form.description, TokenRole::kFormDesc, kDescBlock);
    }
  }

  void EmitBlock(const Block& b, int index) {
    Type(b.type, index);
    Text(b.title, TokenRole::kBlockTitle, index);
    Sep(index);
    if (b.description) Text(*b.description, TokenRole::kBlockDesc, index);
    if (HasOptions(b.type)) {
      Sep(index);
      Items(b.options, TokenRole::kOption, index);
    } else if (b.type == BlockType::kLikert) {
      Sep(index);
      Items(b.rows, TokenRole::kLikertRow, index);
      Sep(index);
      Items(b.columns, TokenRole::kLikertColumn, index);
    }
  }

  std::vector<AnnotatedToken> Take() { return std::move(out_); }

 private:
  const Vocab& vocab_;
  const SerializeOptions& options_;
  std::vector<AnnotatedToken> out_;
};

class Parser {
 public:
  Parser(const AnnotatedSequence& seq, const Vocab& vocab) : seq_(seq), vocab_(vocab) {
    derived_.reserve(seq.size());
  }

  Form Parse() {
    Form form;
    form.title = Text(TokenRole::kFormTitle, kTitleBlock, /*required=*/true, "form title");
    Expect(kSep, kTitleBlock, "separator after form title");
    std::string desc = Text(TokenRole::kFormDesc, kDescBlock, false, "");
    if (!desc.empty()) form.description = std::move(desc);

    int index = 0;
    while (pos_ < seq_.size()) {
      ++index;
      const TokenId id = seq_.tokens[pos_].id;
      if (!IsTypeToken(id)) Fail("expected a block type token");
      Push(TokenRole::kBlockType, index);
      Block b;
      b.type = TypeOfToken(id);
      b.title = Text(TokenRole::kBlockTitle, index, true, "block title");
      Expect(kSep, index, "separator after block title");
      std::string bdesc = Text(TokenRole::kBlockDesc, index, false, "");
      if (!bdesc.empty()) b.description = std::move(bdesc);
      if (HasOptions(b.type)) {
        Expect(kSep, index, "separator before options");
        b.options = Items(TokenRole::kOption, index, /*allow_empty=*/true);
      } else if (b.type == BlockType::kLikert) {
        Expect(kSep, index, "separator before Likert rows");
        b.rows = Items(TokenRole::kLikertRow, index, false);
        Expect(kSep, index, "separator before Likert columns");
        b.columns = Items(TokenRole::kLikertColumn, index, false);
      }
      if (pos_ < seq_.size() && !IsTypeToken(seq_.tokens[pos_].id)) {
        Fail("unexpected token after block content");
      }
      form.blocks.push_back(std::move(b));
    }
    if (form.blocks.empty()) Fail("form has no blocks");

    for (std::size_t k = 0; k < derived_.size(); ++k) {
      if (derived_[k] != seq_.tokens[k].annotation()) {
        throw Error(ErrorCode::kAnnotationMismatch,
                    "token " + std::to_string(k) + " carries " +
                        std::string(TokenRoleName(seq_.tokens[k].role)) + "@" +
                        std::to_string(seq_.tokens[k].block_index) + ", grammar implies " +
                        std::string(TokenRoleName(derived_[k].role)) + "@" +
                        std::to_string(derived_[k].block_index));
      }
    }
    return form;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kMalformedSequence, what + " at position " + std::to_string(pos_));
  }

  void Push(TokenRole role, int block) {
    derived_.push_back({role, block});
    ++pos_;
  }

  void Expect(TokenId id, int block, const char* what) {
    if (pos_ >= seq_.size() || seq_.tokens[pos_].id != id) Fail(std::string("expected ") + what);
    Push(TokenRole::kSep, block);
  }

  std::string Text(TokenRole role, int block, bool required, const char* what) {
    std::vector<TokenId> ids;
    while (pos_ < seq_.size() && IsContent(seq_.tokens[pos_].id)) {
      ids.push_back(seq_.tokens[pos_].id);
      Push(role, block);
    }
    if (required && ids.empty()) Fail(std::string("missing ") + what);
    return vocab_.Decode(ids);
  }

  std::vector<std::string> Items(TokenRole role, int block, bool allow_empty) {
    std::vector<std::string> items;
    if (pos_ >= seq_.size() || !IsContent(seq_.tokens[pos_].id)) {
      if (!allow_empty) Fail("expected at least one item");
      return items;
    }
    items.push_back(Text(role, block, true, "item"));
    while (pos_ < seq_.size() && seq_.tokens[pos_].id == kBar) {
      Push(TokenRole::kSep, block);
      items.push_back(Text(role, block, true, "item after '|'"));
    }
    return items;
  }

  const AnnotatedSequence& seq_;
  const Vocab& vocab_;
  std::size_t pos_ = 0;
  std::vector<TokenAnnotation> derived_;
};

}  // namespace

std::string_view TokenRoleName(TokenRole role) {
  return kRoleNames[static_cast<std::size_t>(role)];
}

std::optional<TokenRole> ParseTokenRole(std::string_view name) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) return static_cast<TokenRole>(i);
  }
  return std::nullopt;
}

std::vector<TokenId> AnnotatedSequence::ids() const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.id);
  return out;
}

std::vector<TokenAnnotation> AnnotatedSequence::annotations() const {
  std::vector<TokenAnnotation> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.annotation());
  return out;
}

AnnotatedSequence SerializeForm(const Form& form, const Vocab& vocab) {
  const SerializeOptions options;
  Emitter e(vocab, options);
  e.Header(form, true);
  for (std::size_t i = 0; i < form.blocks.size(); ++i) {
    e.EmitBlock(form.blocks[i], static_cast<int>(i) + 1);
  }
  return {e.Take()};
}

Form ParseSequence(const AnnotatedSequence& seq, const Vocab& vocab) {
  return Parser(seq, vocab).Parse();
}

AnnotatedSequence SerializeContext(const TaskSample& sample, const Vocab& vocab,
                                   const SerializeOptions& options) {
  const int i = sample.block_index;
  const Form& ctx = sample.context;
  if (i < 1 || static_cast<std::size_t>(i - 1) != ctx.blocks.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "context must hold exactly block_index - 1 blocks");
  }

  Emitter extra_e(vocab, options);
  if (sample.task == Task::kQuestionRec) {
    extra_e.Type(sample.block_type, i, /*force=*/true);
  } else {
    extra_e.Text(sample.block_title, TokenRole::kBlockTitle, i);
  }
  std::vector<AnnotatedToken> extra = extra_e.Take();

  AnnotatedSequence out;
  if (options.context == ContextMode::kLastTitle) {
    // Only the closest block title survives.
    if (sample.task == Task::kQuestionRec && i > 1) {
      Emitter e(vocab, options);
      e.Text(ctx.blocks.back().title, TokenRole::kBlockTitle, i - 1);
      out.tokens = e.Take();
    }
    out.tokens.insert(out.tokens.end(), extra.begin(), extra.end());
    if (out.size() > options.max_source_len) {
      throw Error(ErrorCode::kContextOverflow, "closest title does not fit");
    }
    return out;
  }

  Emitter head_e(vocab, options);
  head_e.Header(ctx, false);
  std::vector<AnnotatedToken> head = head_e.Take();
  Emitter desc_e(vocab, options);
  if (ctx.description) desc_e.Text(*ctx.description, TokenRole::kFormDesc, kDescBlock);
  std::vector<AnnotatedToken> desc = desc_e.Take();

  std::vector<std::vector<AnnotatedToken>> blocks;
  std::size_t total = head.size() + desc.size() + extra.size();
  for (std::size_t b = 0; b < ctx.blocks.size(); ++b) {
    Emitter be(vocab, options);
    be.EmitBlock(ctx.blocks[b], static_cast<int>(b) + 1);
    blocks.push_back(be.Take());
    total += blocks.back().size();
  }

  std::size_t first = 0;
  while (total > options.max_source_len && first < blocks.size()) {
    total -= blocks[first++].size();
  }
  if (total > options.max_source_len) {
    total -= desc.size();
    desc.clear();
  }
  if (total > options.max_source_len) {
    throw Error(ErrorCode::kContextOverflow,
                "form title plus task item need " + std::to_string(total) + " tokens, limit " +
                    std::to_string(options.max_source_len));
  }

  out.tokens.reserve(total);
  out.tokens.insert(out.tokens.end(), head.begin(), head.end());
  out.tokens.insert(out.tokens.end(), desc.begin(), desc.end());
  for (std::size_t b = first; b < blocks.size(); ++b) {
    out.tokens.insert(out.tokens.end(), blocks[b].begin(), blocks[b].end());
  }
  out.tokens.insert(out.tokens.end(), extra.begin(), extra.end());
  return out;
}

Form CanonicalForm(const Form& form, const Vocab& vocab) {
  auto canon = [&](const std::string& s) { return vocab.Decode(vocab.Encode(s)); };
  auto canon_list = [&](std::vector<std::string>& items) {
    for (auto& s : items) s = canon(s);
  };
  Form out = form;
  out.title = canon(out.title);
  if (out.description) out.description = canon(*out.description);
  for (Block& b : out.blocks) {
    b.title = canon(b.title);
    if (b.description) b.description = canon(*b.description);
    canon_list(b.options);
    canon_list(b.rows);
    canon_list(b.columns);
  }
  return out;
}

std::string RenderSequence(const AnnotatedSequence& seq, const Vocab& vocab) {
  std::ostringstream os;
  for (const auto& t : seq.tokens) {
    os << std::left << std::setw(6) << t.id << "  " << std::setw(18) << vocab.Token(t.id)
       << "  " << std::setw(12) << TokenRoleName(t.role) << "  " << t.block_index << '\n';
  }
  return os.str();
}

}  // namespace formstruct
