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

#include "formstruct/metrics.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "formstruct/error.hpp"

namespace formstruct {

namespace {

bool IsAlnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char Lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

double FMeasure(double overlap, double candidate_total, double reference_total) {
  if (overlap <= 0.0 || candidate_total <= 0.0 || reference_total <= 0.0) return 0.0;
  const double p = overlap / candidate_total;
  const double r = overlap / reference_total;
  return 100.0 * 2.0 * p * r / (p + r);
}

}  // namespace

std::vector<std::string> RougeTokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (IsAlnum(c)) {
      cur.push_back(Lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double RougeN(std::span<const std::string> candidate, std::span<const std::string> reference,
              int n) {
  auto grams = [n](std::span<const std::string> toks) {
    std::map<std::vector<std::string>, int> counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= toks.size(); ++i) {
      ++counts[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                        toks.begin() + static_cast<std::ptrdiff_t>(i) + n)];
    }
    return counts;
  };
  const auto c = grams(candidate);
  const auto r = grams(reference);
  double overlap = 0.0, c_total = 0.0, r_total = 0.0;
  for (const auto& [g, k] : c) {
    c_total += k;
    auto it = r.find(g);
    if (it != r.end()) overlap += std::min(k, it->second);
  }
  for (const auto& [g, k] : r) r_total += k;
  return FMeasure(overlap, c_total, r_total);
}

double RougeL(std::span<const std::string> candidate, std::span<const std::string> reference) {
  const std::size_t m = candidate.size();
  const std::size_t n = reference.size();
  std::vector<int> prev(n + 1, 0), cur(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return FMeasure(prev[n], static_cast<double>(m), static_cast<double>(n));
}

RougeScores Rouge(std::string_view candidate, std::string_view reference) {
  const auto c = RougeTokens(candidate);
  const auto r = RougeTokens(reference);
  return {RougeN(c, r, 1), RougeN(c, r, 2), RougeL(c, r)};
}

ClassificationScores ClassificationMetrics(std::span<const BlockType> predictions,
                                           std::span<const BlockType> golds) {
  if (predictions.empty() && golds.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no predictions to score");
  }
  if (predictions.size() != golds.size()) {
    throw Error(ErrorCode::kInvalidArgument, "predictions and golds differ in length");
  }
  std::array<double, kNumBlockTypes> tp{}, pred_count{}, gold_count{};
  double correct = 0.0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const auto p = static_cast<std::size_t>(BlockTypeCode(predictions[i]));
    const auto g = static_cast<std::size_t>(BlockTypeCode(golds[i]));
    pred_count[p] += 1;
    gold_count[g] += 1;
    if (p == g) {
      tp[g] += 1;
      correct += 1;
    }
  }
  double f1_sum = 0.0;
  int classes = 0;
  for (std::size_t c = 0; c < kNumBlockTypes; ++c) {
    if (pred_count[c] == 0 && gold_count[c] == 0) continue;
    ++classes;
    if (tp[c] > 0) f1_sum += 2.0 * tp[c] / (pred_count[c] + gold_count[c]);
  }
  return {f1_sum / classes, correct / static_cast<double>(golds.size())};
}

}  // namespace formstruct
