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

#include <doctest.h>

#include <set>

#include "formstruct/error.hpp"
#include "formstruct/tokenizer.hpp"
#include "helpers.hpp"

using namespace formstruct;

TEST_CASE("tokenize lowercases and splits punctuation") {
  CHECK(Tokenize("Full  Name?") == std::vector<std::string>{"full", "name", "?"});
  CHECK(Tokenize("e-mail (work)") == std::vector<std::string>{"e", "-", "mail", "(", "work", ")"});
  CHECK(Tokenize("   ").empty());
}

TEST_CASE("special ids") {
  const Vocab v;
  CHECK(v.size() == static_cast<std::size_t>(kFirstCorpusToken));
  CHECK(v.Token(kPad) == "<pad>");
  CHECK(v.Token(kBar) == "|");
  CHECK(kMask < 15);
  std::set<TokenId> type_ids;
  for (BlockType t : kAllBlockTypes) {
    const TokenId id = TypeToken(t);
    CHECK(IsTypeToken(id));
    CHECK(TypeOfToken(id) == t);
    CHECK(id >= 7);
    CHECK(id <= 14);
    type_ids.insert(id);
  }
  CHECK(type_ids.size() == 8);
  CHECK_FALSE(IsTypeToken(kTypePlaceholder));
}

TEST_CASE("build_vocab frequency cutoff, ordering and determinism") {
  const std::vector<std::string> texts = {"a a b"};
  const Vocab v = Vocab::Build(texts, 2);
  CHECK(v.Contains("a"));
  CHECK_FALSE(v.Contains("b"));
  CHECK(v.Id("b") == kUnk);

  const std::vector<std::string> more = {"b c c a", "c b d"};
  const Vocab w = Vocab::Build(more, 1);
  // c:3, b:2, a:1, d:1 -> c, b, then a before d.
  CHECK(w.Id("c") == kFirstCorpusToken);
  CHECK(w.Id("b") == kFirstCorpusToken + 1);
  CHECK(w.Id("a") == kFirstCorpusToken + 2);
  CHECK(w.Id("d") == kFirstCorpusToken + 3);
  CHECK(Vocab::Build(more, 1) == w);

  const Vocab capped = Vocab::Build(more, 1, kFirstCorpusToken + 2);
  CHECK(capped.size() == static_cast<std::size_t>(kFirstCorpusToken + 2));
  CHECK_FALSE(capped.Contains("a"));
}

TEST_CASE("vocab is a bijection") {
  const Vocab v = testing::VocabFor(testing::Synthetic(50, 3));
  for (std::size_t id = 0; id < v.size(); ++id) {
    CHECK(v.Id(v.Token(static_cast<TokenId>(id))) == static_cast<TokenId>(id));
  }
}

TEST_CASE("encode / decode") {
  const std::vector<std::string> texts = {"full name", "yes no"};
  const Vocab v = Vocab::Build(texts, 1);
  const auto ids = v.Encode("full name");
  CHECK(ids == std::vector<TokenId>{v.Id("full"), v.Id("name")});
  CHECK(v.Decode(ids) == "full name");
  CHECK(v.Encode("zebra") == std::vector<TokenId>{kUnk});
  const std::vector<TokenId> bar = {kBar};
  CHECK(v.Decode(bar) == "|");
  const std::vector<TokenId> bad = {static_cast<TokenId>(v.size())};
  CHECK_THROWS_AS(v.Decode(bad), Error);
  for (TokenId id : v.Encode("Full Name yes no")) CHECK(id >= kFirstCorpusToken);
}

TEST_CASE("vocab save / load round trip") {
  const Vocab v = testing::VocabFor(testing::Synthetic(20, 5));
  const auto dir = testing::ScratchDir("vocab");
  v.Save(dir / "vocab.txt");
  CHECK(Vocab::Load(dir / "vocab.txt") == v);
  std::vector<std::string> bad = v.tokens();
  std::swap(bad[kMask], bad[kSep]);
  CHECK_THROWS_AS(Vocab::FromTokens(bad), Error);
}
