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

#ifndef FORMSTRUCT_FORM_HPP_
#define FORMSTRUCT_FORM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace formstruct {

// Integer codes are the classification labels and must stay stable.
enum class BlockType : std::uint8_t {
  kTextField = 0,
  kChoice = 1,
  kTime = 2,
  kDate = 3,
  kLikert = 4,
  kRating = 5,
  kUpload = 6,
  kDescription = 7,
};

inline constexpr int kNumBlockTypes = 8;

inline constexpr std::array<BlockType, kNumBlockTypes> kAllBlockTypes = {
    BlockType::kTextField, BlockType::kChoice, BlockType::kTime,
    BlockType::kDate,      BlockType::kLikert, BlockType::kRating,
    BlockType::kUpload,    BlockType::kDescription};

// Canonical display name ("TextField", "Choice", ...).
std::string_view BlockTypeName(BlockType type);
// Lowercase key used in the JSON schema ("textfield", "choice", ...).
std::string_view BlockTypeKey(BlockType type);
// Accepts either spelling, case-insensitively; also "text", "text_field".
std::optional<BlockType> ParseBlockType(std::string_view text);

inline int BlockTypeCode(BlockType type) { return static_cast<int>(type); }
BlockType BlockTypeFromCode(int code);

// Choice and Rating blocks carry options (rating scores are stored as text).
bool HasOptions(BlockType type);

struct Block {
  BlockType type = BlockType::kTextField;
  std::string title;
  std::optional<std::string> description;
  std::vector<std::string> options;
  std::vector<std::string> rows;
  std::vector<std::string> columns;

  friend bool operator==(const Block&, const Block&) = default;
};

struct Form {
  std::string title;
  std::optional<std::string> description;
  std::vector<Block> blocks;

  friend bool operator==(const Form&, const Form&) = default;
};

struct Violation {
  std::string path;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

// Lists every invariant violation; an empty report means the form is valid.
ValidationReport ValidateForm(const Form& form);

enum class NodeKind { kType, kTitle, kDescription, kRow, kOption, kColumn };

std::string_view NodeKindName(NodeKind kind);

// Children of a block node in tree order: Type, Title, Desc (if present),
// rows (Likert), then options or columns.
std::vector<std::pair<NodeKind, std::string>> ChildrenOfBlock(
    const Block& block);

// Drops non-printable characters, collapses whitespace runs, trims, and
// replaces the reserved '|' separator with '/'. Idempotent.
std::string NormalizeText(std::string_view raw);

// Applies NormalizeText to every text field of the form.
Form NormalizeForm(Form form);

}  // namespace formstruct

#endif  // FORMSTRUCT_FORM_HPP_
