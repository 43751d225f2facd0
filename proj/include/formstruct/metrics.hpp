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

#ifndef FORMSTRUCT_METRICS_HPP_
#define FORMSTRUCT_METRICS_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "formstruct/form.hpp"

namespace formstruct {

// Lowercased maximal runs of ASCII letters and digits; everything else,
// including the option bar, separates tokens and is dropped.
std::vector<std::string> RougeTokens(std::string_view text);

// F-measures in percent. An empty side scores zero.
struct RougeScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
};

RougeScores Rouge(std::string_view candidate, std::string_view reference);
double RougeN(std::span<const std::string> candidate, std::span<const std::string> reference, int n);
double RougeL(std::span<const std::string> candidate, std::span<const std::string> reference);

struct ClassificationScores {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

// Macro-F1 over the block types present in either list. Throws EmptyInput
// for empty input and InvalidArgument for unequal lengths.
ClassificationScores ClassificationMetrics(std::span<const BlockType> predictions,
                                           std::span<const BlockType> golds);

}  // namespace formstruct

#endif  // FORMSTRUCT_METRICS_HPP_
