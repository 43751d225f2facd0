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

#include "formstruct/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "formstruct/error.hpp"

namespace formstruct {
namespace {

std::vector<std::string> SpecialTokens() {
  std::vector<std::string> t = {"<pad>", "<s>", "</s>", "<unk>", "<mask>", "<sep>", "|"};
  for (BlockType type : kAllBlockTypes) {
    t.push_back("<" + std::string(BlockTypeKey(type)) + ">");
  }
  t.push_back("<type>");
  return t;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

Vocab::Vocab() : id_to_token_(SpecialTokens()) { Index(); }

Vocab Vocab::Build(std::span<const std::string> texts, int min_frequency,
                   std::size_t max_size) {
  std::map<std::string, long> counts;
  for (const auto& text : texts) {
    for (auto& tok : Tokenize(text)) ++counts[tok];
  }
  Vocab vocab;
  std::vector<std::pair<std::string, long>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_frequency && !vocab.Contains(tok)) ranked.emplace_back(tok, n);
  }
  // Descending frequency, ties lexicographic. `counts` is already sorted by
  // token, so a stable sort on frequency alone gives the tie order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (auto& [tok, n] : ranked) {
    if (vocab.id_to_token_.size() >= max_size) break;
    vocab.id_to_token_.push_back(tok);
  }
  vocab.Index();
  return vocab;
}

Vocab Vocab::FromTokens(std::vector<std::string> tokens) {
  const auto specials = SpecialTokens();
  if (tokens.size() < specials.size() ||
      !std::equal(specials.begin(), specials.end(), tokens.begin())) {
    throw Error(ErrorCode::kMalformedDocument, "vocabulary does not start with the reserved tokens");
  }
  Vocab vocab;
  vocab.id_to_token_ = std::move(tokens);
  vocab.Index();
  if (vocab.token_to_id_.size() != vocab.id_to_token_.size()) {
    throw Error(ErrorCode::kMalformedDocument, "vocabulary has duplicate tokens");
  }
  return vocab;
}

void Vocab::Index() {
  token_to_id_.clear();
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i));
  }
}

TokenId Vocab::Id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocab::Contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

const std::string& Vocab::Token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw Error(ErrorCode::kInvalidTokenId, std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocab::Encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& tok : Tokenize(text)) ids.push_back(Id(tok));
  return ids;
}

std::string Vocab::Decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (!out.empty()) out.push_back(' ');
    out += Token(id);
  }
  return out;
}

void Vocab::Save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& tok : id_to_token_) os << tok << '\n';
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::string> tokens;
  for (std::string line; std::getline(is, line);) tokens.push_back(line);
  return FromTokens(std::move(tokens));
}

std::vector<std::string> CollectTexts(std::span<const Form> forms) {
  std::vector<std::string> texts;
  for (const Form& f : forms) {
    texts.push_back(f.title);
    if (f.description) texts.push_back(*f.description);
    for (const Block& b : f.blocks) {
      texts.push_back(b.title);
      if (b.description) texts.push_back(*b.description);
      texts.insert(texts.end(), b.options.begin(), b.options.end());
      texts.insert(texts.end(), b.rows.begin(), b.rows.end());
      texts.insert(texts.end(), b.columns.begin(), b.columns.end());
    }
  }
  return texts;
}

}  // namespace formstruct
