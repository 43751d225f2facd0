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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "formstruct/error.hpp"
#include "formstruct/objectives.hpp"
#include "helpers.hpp"

using namespace formstruct;

namespace {

bool IsStructural(const AnnotatedToken& t) {
  return t.id == kSep || t.id == kBar || IsTypeToken(t.id) || t.id == kTypePlaceholder;
}

}  // namespace

TEST_CASE("btp permutes titles only and inverts") {
  const Form k = testing::KitchenSinkForm();
  Rng rng(3);
  bool moved = false;
  for (int trial = 0; trial < 50; ++trial) {
    const BtpResult r = ApplyBtp(k, rng);
    std::vector<int> sorted = r.permutation;
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < static_cast<int>(sorted.size()); ++j) CHECK(sorted[j] == j);
    for (std::size_t j = 0; j < k.blocks.size(); ++j) {
      const Block& b = r.form.blocks[j];
      CHECK(b.type == k.blocks[j].type);
      CHECK(b.options == k.blocks[j].options);
      CHECK(b.rows == k.blocks[j].rows);
      CHECK(b.description == k.blocks[j].description);
      CHECK(r.form.blocks[static_cast<std::size_t>(r.permutation[j])].title == k.blocks[j].title);
      moved |= r.permutation[j] != static_cast<int>(j);
    }
    CHECK(r.form.title == k.title);
    CHECK(InvertBtp(r.form, r.permutation) == k);
  }
  CHECK(moved);

  Form one = k;
  one.blocks.resize(1);
  CHECK(ApplyBtp(one, rng).form == one);
  const std::vector<int> short_perm = {0};
  CHECK_THROWS_AS(InvertBtp(k, short_perm), Error);
}

TEST_CASE("btp draws permutations uniformly") {
  Form f{"t", std::nullopt,
         {{BlockType::kTextField, "a", {}, {}, {}, {}},
          {BlockType::kTextField, "b", {}, {}, {}, {}},
          {BlockType::kTextField, "c", {}, {}, {}, {}}}};
  Rng rng(8);
  std::map<std::vector<int>, int> counts;
  const int draws = 6000;
  for (int i = 0; i < draws; ++i) ++counts[ApplyBtp(f, rng).permutation];
  CHECK(counts.size() == 6);
  for (const auto& [perm, n] : counts) CHECK(std::abs(n - draws / 6) < 150);
}

TEST_CASE("maskable nodes are maximal content runs") {
  const Form k = testing::KitchenSinkForm();
  const Vocab v = testing::VocabFor(k);
  const AnnotatedSequence s = SerializeForm(k, v);
  const auto nodes = MaskableNodes(s);
  std::vector<bool> covered(s.size(), false);
  for (const auto& [a, b] : nodes) {
    REQUIRE(a < b);
    for (std::size_t i = a; i < b; ++i) {
      CHECK_FALSE(IsStructural(s.tokens[i]));
      CHECK(s.tokens[i].annotation() == s.tokens[a].annotation());
      covered[i] = true;
    }
    if (b < s.size() && !IsStructural(s.tokens[b])) CHECK_FALSE(s.tokens[b].annotation() == s.tokens[a].annotation());
  }
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(covered[i] == !IsStructural(s.tokens[i]));
  // "monday", "tuesday", "friday" are three nodes separated by bars.
  const auto option_nodes = std::count_if(nodes.begin(), nodes.end(), [&](const auto& n) {
    return s.tokens[n.first].role == TokenRole::kOption && s.tokens[n.first].block_index == 3;
  });
  CHECK(option_nodes == 3);
}

TEST_CASE("span masking respects the budget, node boundaries and structure") {
  const auto forms = testing::Synthetic(60, 5);
  const Vocab v = testing::VocabFor(forms);
  Rng rng(12);
  std::map<MaskAction, int> actions;
  for (const auto& r : forms) {
    const AnnotatedSequence s = SerializeForm(r.form, v);
    const auto nodes = MaskableNodes(s);
    const SpanMlmResult m = ApplySpanMlm(s, v.size(), rng);
    std::size_t masked = 0;
    std::size_t prev_end = 0;
    for (const MaskedSpan& span : m.record.spans) {
      CHECK(span.start >= prev_end);
      prev_end = span.end;
      CHECK(std::find(nodes.begin(), nodes.end(), std::make_pair(span.start, span.end)) != nodes.end());
      REQUIRE(span.actions.size() == span.end - span.start);
      for (std::size_t p = span.start; p < span.end; ++p) {
        const MaskAction a = span.actions[p - span.start];
        ++actions[a];
        CHECK(span.original[p - span.start] == s.tokens[p].id);
        if (a == MaskAction::kMask) CHECK(m.ids[p] == kMask);
        if (a == MaskAction::kKeep) CHECK(m.ids[p] == s.tokens[p].id);
        if (a == MaskAction::kRandom) {
          CHECK(m.ids[p] >= kFirstCorpusToken);
          CHECK(m.ids[p] < static_cast<TokenId>(v.size()));
        }
      }
      masked += span.end - span.start;
    }
    const double budget = 0.15 * static_cast<double>(s.size());
    CHECK(static_cast<double>(masked) >= budget);
    if (!m.record.spans.empty()) {
      std::size_t largest = 0;
      for (const auto& span : m.record.spans) largest = std::max(largest, span.end - span.start);
      CHECK(static_cast<double>(masked - largest) < budget);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (IsStructural(s.tokens[i])) CHECK(m.ids[i] == s.tokens[i].id);
    }
    CHECK(RestoreIds(m.ids, m.record) == s.ids());
  }
  const double total = actions[MaskAction::kMask] + actions[MaskAction::kRandom] + actions[MaskAction::kKeep];
  CHECK(actions[MaskAction::kMask] / total == doctest::Approx(0.8).epsilon(0.05));
  CHECK(actions[MaskAction::kRandom] / total == doctest::Approx(0.1).epsilon(0.25));
  CHECK(actions[MaskAction::kKeep] / total == doctest::Approx(0.1).epsilon(0.25));
}

TEST_CASE("span masking edge cases") {
  const Form k = testing::KitchenSinkForm();
  const Vocab v = testing::VocabFor(k);
  const AnnotatedSequence s = SerializeForm(k, v);
  Rng rng(1);
  const SpanMlmResult none = ApplySpanMlm(s, v.size(), rng, 0.0);
  CHECK(none.record.spans.empty());
  CHECK(none.ids == s.ids());

  const SpanMlmResult all = ApplySpanMlm(s, v.size(), rng, 1.0);
  CHECK(all.record.spans.size() == MaskableNodes(s).size());

  // Without corpus tokens a random replacement degrades to the mask.
  const SpanMlmResult tiny = ApplySpanMlm(s, kFirstCorpusToken, rng, 1.0);
  for (const auto& span : tiny.record.spans) {
    for (std::size_t p = span.start; p < span.end; ++p) {
      if (span.actions[p - span.start] == MaskAction::kRandom) CHECK(tiny.ids[p] == kMask);
    }
  }

  CorruptionRecord bad;
  bad.spans.push_back({0, 3, {1}, {MaskAction::kMask}});
  const auto ids = s.ids();
  CHECK_THROWS_AS(RestoreIds(ids, bad), Error);
}

TEST_CASE("denoising examples") {
  const auto forms = testing::Synthetic(40, 9);
  const Vocab v = testing::VocabFor(forms);
  Rng rng(4);
  for (const auto& r : forms) {
    const DenoisingExample ex = BuildDenoisingExample(r.form, v, rng);
    CHECK(ex.target == SerializeForm(r.form, v).ids());
    // Undo the masking, parse, undo the permutation: the original comes back.
    AnnotatedSequence restored = ex.corrupted;
    const auto ids = RestoreIds(ex.corrupted.ids(), ex.record);
    for (std::size_t i = 0; i < ids.size(); ++i) restored.tokens[i].id = ids[i];
    const Form permuted = ParseSequence(restored, v);
    CHECK(InvertBtp(permuted, ex.record.permutation) == CanonicalForm(r.form, v));
  }
}

TEST_CASE("reconstruction loss closed forms") {
  const std::vector<TokenId> targets = {5, kPad, 7, 2};
  Matrix<double> uniform = Matrix<double>::Zero(4, 10);
  CHECK(ReconstructionLoss<double>(uniform, targets) == doctest::Approx(std::log(10.0)).epsilon(1e-12));

  std::mt19937 gen(2);
  std::normal_distribution<double> dist;
  Matrix<double> z(4, 10);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = dist(gen);
  double want = 0.0;
  for (int i : {0, 2, 3}) {
    double s = 0.0;
    for (int c = 0; c < 10; ++c) s += std::exp(z(i, c));
    want += std::log(s) - z(i, targets[static_cast<std::size_t>(i)]);
  }
  CHECK(ReconstructionLoss<double>(z, targets) == doctest::Approx(want / 3).epsilon(1e-12));

  nn::Tape<double> t;
  const nn::Var logits = t.Constant(z);
  CHECK(t.value(ReconstructionLoss<double>(t, logits, targets))(0, 0) == doctest::Approx(want / 3).epsilon(1e-12));
  CHECK(t.value(ReconstructionLoss<double>(t, logits, targets, kPad, 12))(0, 0) ==
        doctest::Approx(want / 12).epsilon(1e-12));

  const std::vector<TokenId> pads = {kPad, kPad, kPad, kPad};
  auto code = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  CHECK(code([&] { ReconstructionLoss<double>(z, pads); }) == ErrorCode::kEmptyLossSupport);
  CHECK(code([&] { ReconstructionLoss<double>(t, logits, pads); }) == ErrorCode::kEmptyLossSupport);
  CHECK(CountNonPad(targets) == 3);
  const std::vector<TokenId> short_targets = {1};
  CHECK_THROWS_AS(ReconstructionLoss<double>(z, short_targets), Error);
}
