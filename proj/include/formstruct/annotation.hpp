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

#ifndef FORMSTRUCT_ANNOTATION_HPP_
#define FORMSTRUCT_ANNOTATION_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

namespace formstruct {

// The role a token plays in a flattened form; these are the lookup keys of
// the structural type-bias table.
enum class TokenRole : std::uint8_t {
  kFormTitle = 0,
  kFormDesc = 1,
  kBlockTitle = 2,
  kBlockDesc = 3,
  kOption = 4,
  kLikertRow = 5,
  kLikertColumn = 6,
  kBlockType = 7,
  kSep = 8,
};

inline constexpr int kNumTokenRoles = 9;

std::string_view TokenRoleName(TokenRole role);
std::optional<TokenRole> ParseTokenRole(std::string_view name);

// Block position of a token: -1 for the form title (and the separator that
// closes it), 0 for the form description, i >= 1 for block B_i.
inline constexpr int kTitleBlock = -1;
inline constexpr int kDescBlock = 0;

struct TokenAnnotation {
  TokenRole role = TokenRole::kSep;
  int block_index = kTitleBlock;

  friend bool operator==(const TokenAnnotation&, const TokenAnnotation&) = default;
};

// Block-level distance: zero when either token belongs to the form title,
// otherwise the absolute block-index difference (description is block 0).
inline int BlockDistance(const TokenAnnotation& a, const TokenAnnotation& b) {
  if (a.role == TokenRole::kFormTitle || b.role == TokenRole::kFormTitle ||
      a.block_index == kTitleBlock || b.block_index == kTitleBlock) {
    return 0;
  }
  const int d = a.block_index - b.block_index;
  return d < 0 ? -d : d;
}

}  // namespace formstruct

#endif  // FORMSTRUCT_ANNOTATION_HPP_
