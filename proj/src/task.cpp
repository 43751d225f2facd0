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

#include "formstruct/task.hpp"

namespace formstruct {

std::string_view TaskKey(Task task) {
  switch (task) {
    case Task::kQuestionRec: return "question";
    case Task::kTypeSuggest: return "type";
    case Task::kOptionsRec: return "options";
  }
  return "?";
}

std::optional<Task> ParseTask(std::string_view key) {
  if (key == "question") return Task::kQuestionRec;
  if (key == "type") return Task::kTypeSuggest;
  if (key == "options") return Task::kOptionsRec;
  return std::nullopt;
}

}  // namespace formstruct
