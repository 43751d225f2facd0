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

#ifndef FORMSTRUCT_TASK_HPP_
#define FORMSTRUCT_TASK_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "formstruct/form.hpp"

namespace formstruct {

enum class Task { kQuestionRec, kTypeSuggest, kOptionsRec };

// "question", "type", "options" (CLI spelling).
std::string_view TaskKey(Task task);
std::optional<Task> ParseTask(std::string_view key);

inline bool IsGenerationTask(Task task) { return task != Task::kTypeSuggest; }

// One (context, target) instance for block B_i of a form. `context` holds the
// form title, description and blocks B_1..B_{i-1}; it may have zero blocks.
struct TaskSample {
  Task task = Task::kQuestionRec;
  std::string form_id;
  int block_index = 1;
  Form context;
  BlockType block_type = BlockType::kTextField;  // Type_i
  std::string block_title;                       // Title_i
  std::string target;  // generation target text; type name for TypeSuggest
};

}  // namespace formstruct

#endif  // FORMSTRUCT_TASK_HPP_
