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

#ifndef FORMSTRUCT_TOKENIZER_HPP_
#define FORMSTRUCT_TOKENIZER_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "formstruct/form.hpp"

namespace formstruct {

using TokenId = int;

// Reserved ids. Specials occupy 0..14; kTypePlaceholder (15) is the neutral
// "<type>" token used when block type tokens are ablated.
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr TokenId kMask = 4;
inline constexpr TokenId kSep = 5;
inline constexpr TokenId kBar = 6;
inline constexpr TokenId kFirstTypeToken = 7;
inline constexpr TokenId kNumSpecials = kFirstTypeToken + kNumBlockTypes;  // 15
inline constexpr TokenId kTypePlaceholder = kNumSpecials;
inline constexpr TokenId kFirstCorpusToken = kTypePlaceholder + 1;

inline TokenId TypeToken(BlockType type) {
  return kFirstTypeToken + BlockTypeCode(type);
}
inline bool IsTypeToken(TokenId id) {
  return id >= kFirstTypeToken && id < kFirstTypeToken + kNumBlockTypes;
}
inline BlockType TypeOfToken(TokenId id) {
  return BlockTypeFromCode(id - kFirstTypeToken);
}

// Lowercases, splits on whitespace, and emits each punctuation character as
// its own token.
std::vector<std::string> Tokenize(std::string_view text);

class Vocab {
 public:
  // Specials plus the placeholder only.
  Vocab();

  static Vocab Build(std::span<const std::string> texts, int min_frequency = 2,
                     std::size_t max_size = 16384);
  static Vocab FromTokens(std::vector<std::string> tokens);

  std::size_t size() const { return id_to_token_.size(); }
  TokenId Id(std::string_view token) const;  // kUnk when absent
  bool Contains(std::string_view token) const;
  const std::string& Token(TokenId id) const;  // throws InvalidTokenId

  std::vector<TokenId> Encode(std::string_view text) const;
  std::string Decode(std::span<const TokenId> ids) const;

  const std::vector<std::string>& tokens() const { return id_to_token_; }

  // One token per line; line number is the id.
  void Save(const std::filesystem::path& path) const;
  static Vocab Load(const std::filesystem::path& path);

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  void Index();

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// Every text field of the forms, in tree order (vocabulary input).
std::vector<std::string> CollectTexts(std::span<const Form> forms);

}  // namespace formstruct

#endif  // FORMSTRUCT_TOKENIZER_HPP_
