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

#include "formstruct/form.hpp"

#include <algorithm>
#include <cctype>

#include "formstruct/error.hpp"

namespace formstruct {
namespace {

constexpr std::array<std::string_view, kNumBlockTypes> kNames = {
    "TextField", "Choice", "Time",   "Date",
    "Likert",    "Rating", "Upload", "Description"};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsBlank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

void CheckText(const std::string& text, const std::string& path,
               ValidationReport& report) {
  if (IsBlank(text)) {
    report.push_back({path, "empty"});
  } else if (text.find('|') != std::string::npos) {
    report.push_back({path, "contains reserved separator '|'"});
  }
}

void CheckList(const std::vector<std::string>& items, const std::string& path,
               ValidationReport& report) {
  for (std::size_t k = 0; k < items.size(); ++k) {
    CheckText(items[k], path + "[" + std::to_string(k) + "]", report);
  }
}

}  // namespace

std::string_view BlockTypeName(BlockType type) {
  return kNames[static_cast<std::size_t>(type)];
}

std::string_view BlockTypeKey(BlockType type) {
  static const std::array<std::string, kNumBlockTypes> keys = [] {
    std::array<std::string, kNumBlockTypes> k;
    for (std::size_t i = 0; i < kNames.size(); ++i) k[i] = Lower(kNames[i]);
    return k;
  }();
  return keys[static_cast<std::size_t>(type)];
}

std::optional<BlockType> ParseBlockType(std::string_view text) {
  std::string key = Lower(text);
  key.erase(std::remove_if(key.begin(), key.end(),
                           [](char c) { return c == '_' || c == ' ' || c == '-'; }),
            key.end());
  if (key == "text") key = "textfield";
  for (BlockType t : kAllBlockTypes) {
    if (key == BlockTypeKey(t)) return t;
  }
  return std::nullopt;
}

BlockType BlockTypeFromCode(int code) {
  if (code < 0 || code >= kNumBlockTypes) {
    throw Error(ErrorCode::kInvalidArgument,
                "block type code out of range: " + std::to_string(code));
  }
  return static_cast<BlockType>(code);
}

bool HasOptions(BlockType type) {
  return type == BlockType::kChoice || type == BlockType::kRating;
}

ValidationReport ValidateForm(const Form& form) {
  ValidationReport report;
  CheckText(form.title, "title", report);
  if (form.description) CheckText(*form.description, "description", report);
  if (form.blocks.empty()) report.push_back({"blocks", "empty"});

  for (std::size_t i = 0; i < form.blocks.size(); ++i) {
    const Block& b = form.blocks[i];
    const std::string at = "blocks[" + std::to_string(i) + "]";
    CheckText(b.title, at + ".title", report);
    if (b.description) CheckText(*b.description, at + ".description", report);

    if (HasOptions(b.type)) {
      CheckList(b.options, at + ".options", report);
    } else if (!b.options.empty()) {
      report.push_back({at + ".options",
                        "not allowed for " + std::string(BlockTypeName(b.type))});
    }

    if (b.type == BlockType::kLikert) {
      if (b.rows.empty()) report.push_back({at + ".rows", "missing"});
      if (b.columns.empty()) report.push_back({at + ".columns", "missing"});
      CheckList(b.rows, at + ".rows", report);
      CheckList(b.columns, at + ".columns", report);
    } else {
      if (!b.rows.empty()) report.push_back({at + ".rows", "only Likert blocks have rows"});
      if (!b.columns.empty()) {
        report.push_back({at + ".columns", "only Likert blocks have columns"});
      }
    }
  }
  return report;
}

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kType: return "Type";
    case NodeKind::kTitle: return "Title";
    case NodeKind::kDescription: return "Desc";
    case NodeKind::kRow: return "Row";
    case NodeKind::kOption: return "Option";
    case NodeKind::kColumn: return "Column";
  }
  return "?";
}

std::vector<std::pair<NodeKind, std::string>> ChildrenOfBlock(const Block& block) {
  std::vector<std::pair<NodeKind, std::string>> out;
  out.emplace_back(NodeKind::kType, std::string(BlockTypeName(block.type)));
  out.emplace_back(NodeKind::kTitle, block.title);
  if (block.description) out.emplace_back(NodeKind::kDescription, *block.description);
  for (const auto& r : block.rows) out.emplace_back(NodeKind::kRow, r);
  for (const auto& o : block.options) out.emplace_back(NodeKind::kOption, o);
  for (const auto& c : block.columns) out.emplace_back(NodeKind::kColumn, c);
  return out;
}

std::string NormalizeText(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (c < 0x20 || c == 0x7f) continue;  // control characters
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(ch == '|' ? '/' : ch);
  }
  return out;
}

Form NormalizeForm(Form form) {
  auto norm_list = [](std::vector<std::string>& items) {
    for (auto& s : items) s = NormalizeText(s);
  };
  form.title = NormalizeText(form.title);
  if (form.description) form.description = NormalizeText(*form.description);
  for (Block& b : form.blocks) {
    b.title = NormalizeText(b.title);
    if (b.description) b.description = NormalizeText(*b.description);
    norm_list(b.options);
    norm_list(b.rows);
    norm_list(b.columns);
  }
  return form;
}

}  // namespace formstruct
