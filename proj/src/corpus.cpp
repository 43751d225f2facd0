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

#include "formstruct/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include "formstruct/error.hpp"
#include "formstruct/rng.hpp"
#include "formstruct/tokenizer.hpp"
#include <json.hpp>

namespace formstruct {
namespace {

using Json = nlohmann::ordered_json;

std::string StripNonAscii(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (static_cast<unsigned char>(c) < 0x80) out.push_back(c);
  }
  return out;
}

std::string CleanText(const Json& value, const std::string& path) {
  if (!value.is_string()) {
    throw Error(ErrorCode::kMalformedDocument, path + " must be a string");
  }
  return NormalizeText(StripNonAscii(value.get<std::string>()));
}

std::optional<std::string> OptionalText(const Json& obj, const char* key,
                                        const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  std::string text = CleanText(*it, path + "." + key);
  if (text.empty()) return std::nullopt;
  return text;
}

std::vector<std::string> TextList(const Json& obj, const char* key, const std::string& path) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw Error(ErrorCode::kMalformedDocument, path + "." + key + " must be an array");
  }
  for (std::size_t k = 0; k < it->size(); ++k) {
    out.push_back(CleanText((*it)[k], path + "." + key + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Form FormFromJson(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kMalformedDocument, "document is not an object");
  if (!doc.contains("title")) throw Error(ErrorCode::kMalformedDocument, "missing key \"title\"");
  if (!doc.contains("body")) throw Error(ErrorCode::kMalformedDocument, "missing key \"body\"");
  const Json& body = doc["body"];
  if (!body.is_array()) throw Error(ErrorCode::kMalformedDocument, "\"body\" must be an array");

  Form form;
  form.title = CleanText(doc["title"], "title");
  form.description = OptionalText(doc, "description", "");
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Json& jb = body[i];
    const std::string at = "body[" + std::to_string(i) + "]";
    if (!jb.is_object()) throw Error(ErrorCode::kMalformedDocument, at + " is not an object");
    if (!jb.contains("type") || !jb["type"].is_string()) {
      throw Error(ErrorCode::kMalformedDocument, at + ".type missing");
    }
    const std::string type_name = jb["type"].get<std::string>();
    auto type = ParseBlockType(type_name);
    if (!type) throw Error(ErrorCode::kUnknownBlockType, at + ".type = \"" + type_name + "\"");

    Block b;
    b.type = *type;
    b.title = jb.contains("title") ? CleanText(jb["title"], at + ".title") : std::string();
    b.description = OptionalText(jb, "description", at);
    b.options = TextList(jb, "options", at);
    b.rows = TextList(jb, "rows", at);
    b.columns = TextList(jb, "columns", at);
    // Description blocks show their text in the title slot.
    if (b.type == BlockType::kDescription && b.title.empty() && b.description) {
      b.title = *std::exchange(b.description, std::nullopt);
    }
    form.blocks.push_back(std::move(b));
  }

  ValidationReport report = ValidateForm(form);
  if (!report.empty()) {
    std::string msg;
    for (const auto& v : report) msg += (msg.empty() ? "" : "; ") + v.path + ": " + v.message;
    throw Error(ErrorCode::kInvalidForm, msg);
  }
  return form;
}

Json FormToJson(const Form& form, const std::string& id) {
  Json doc = Json::object();
  if (!id.empty()) doc["id"] = id;
  doc["title"] = form.title;
  if (form.description) doc["description"] = *form.description;
  Json body = Json::array();
  for (const Block& b : form.blocks) {
    Json jb = Json::object();
    jb["type"] = std::string(BlockTypeKey(b.type));
    jb["title"] = b.title;
    if (b.description) jb["description"] = *b.description;
    if (HasOptions(b.type)) jb["options"] = b.options;
    if (b.type == BlockType::kLikert) {
      jb["rows"] = b.rows;
      jb["columns"] = b.columns;
    }
    body.push_back(std::move(jb));
  }
  doc["body"] = std::move(body);
  return doc;
}

Json ParseDocument(std::string_view document) {
  try {
    return Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
}

std::string LowerKey(const std::string& s) {
  std::string out = NormalizeText(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string JoinOptions(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t k = 0; k < options.size(); ++k) {
    if (k > 0) out += " | ";
    out += options[k];
  }
  return out;
}

bool Eligible(const Block& b, Task task, const SamplingOptions& options) {
  switch (task) {
    case Task::kQuestionRec:
      return options.question_includes_description_blocks || b.type != BlockType::kDescription;
    case Task::kTypeSuggest:
      return true;
    case Task::kOptionsRec:
      return b.type == BlockType::kChoice && !b.options.empty();
  }
  return false;
}

}  // namespace

Form IngestJson(std::string_view document) { return FormFromJson(ParseDocument(document)); }

FormRecord IngestRecord(std::string_view document, std::string fallback_id) {
  Json doc = ParseDocument(document);
  FormRecord rec;
  rec.id = std::move(fallback_id);
  if (doc.is_object() && doc.contains("id")) {
    const Json& id = doc["id"];
    rec.id = id.is_string() ? id.get<std::string>() : id.dump();
  }
  rec.form = FormFromJson(doc);
  return rec;
}

std::string EmitJson(const Form& form, const std::string& id) { return FormToJson(form, id).dump(); }

std::vector<FormRecord> ReadFormsJsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<FormRecord> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    try {
      out.push_back(IngestRecord(line, "form-" + std::to_string(line_no)));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.message());
    }
  }
  return out;
}

void WriteFormsJsonl(const std::filesystem::path& path, std::span<const FormRecord> records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& r : records) os << EmitJson(r.form, r.id) << '\n';
}

std::vector<FormRecord> FilterCorpus(std::span<const FormRecord> forms,
                                     const LanguageFilter& language) {
  std::vector<FormRecord> kept;
  for (const auto& rec : forms) {
    const auto& blocks = rec.form.blocks;
    const bool has_question = std::any_of(blocks.begin(), blocks.end(), [](const Block& b) {
      return b.type != BlockType::kDescription;
    });
    if (!has_question) continue;
    std::set<std::pair<int, std::string>> seen;
    bool duplicate = false;
    for (const Block& b : blocks) {
      if (!seen.emplace(BlockTypeCode(b.type), LowerKey(b.title)).second) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    if (language && !language(rec.form)) continue;
    kept.push_back(rec);
  }
  return kept;
}

CorpusSplit SplitCorpus(std::span<const FormRecord> forms, std::array<double, 3> ratios,
                        std::uint64_t seed) {
  if (forms.empty()) throw Error(ErrorCode::kEmptyCorpus, "nothing to split");
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9 || *std::min_element(ratios.begin(), ratios.end()) < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "split ratios must be non-negative and sum to 1");
  }
  std::vector<std::size_t> order(forms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);

  const auto n = static_cast<double>(forms.size());
  const auto n_val = static_cast<std::size_t>(std::llround(n * ratios[1]));
  const auto n_test = static_cast<std::size_t>(std::llround(n * ratios[2]));
  if (n_val + n_test > forms.size()) {
    throw Error(ErrorCode::kInvalidArgument, "split ratios leave no room for training forms");
  }
  const std::size_t n_train = forms.size() - n_val - n_test;

  CorpusSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const FormRecord& r = forms[order[k]];
    if (k < n_train) {
      split.train.push_back(r);
    } else if (k < n_train + n_val) {
      split.validation.push_back(r);
    } else {
      split.test.push_back(r);
    }
  }
  return split;
}

void WriteManifest(const std::filesystem::path& path, std::span<const FormRecord> part) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& r : part) os << r.id << '\n';
}

std::vector<std::string> ReadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::string> ids;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

std::vector<FormRecord> SelectById(std::span<const FormRecord> forms,
                                   std::span<const std::string> ids) {
  std::unordered_map<std::string, const FormRecord*> by_id;
  for (const auto& r : forms) by_id.emplace(r.id, &r);
  std::vector<FormRecord> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::kInvalidArgument, "unknown form id " + id);
    out.push_back(*it->second);
  }
  return out;
}

TaskSample MakeSample(const FormRecord& record, Task task, int block_index) {
  const Form& f = record.form;
  if (block_index < 1 || static_cast<std::size_t>(block_index) > f.blocks.size()) {
    throw Error(ErrorCode::kInvalidArgument, "block index out of range");
  }
  const Block& b = f.blocks[static_cast<std::size_t>(block_index - 1)];
  TaskSample s;
  s.task = task;
  s.form_id = record.id;
  s.block_index = block_index;
  s.context.title = f.title;
  s.context.description = f.description;
  s.context.blocks.assign(f.blocks.begin(), f.blocks.begin() + (block_index - 1));
  s.block_type = b.type;
  s.block_title = b.title;
  switch (task) {
    case Task::kQuestionRec: s.target = b.title; break;
    case Task::kTypeSuggest: s.target = std::string(BlockTypeName(b.type)); break;
    case Task::kOptionsRec: s.target = JoinOptions(b.options); break;
  }
  return s;
}

std::vector<TaskSample> SampleTaskInstances(std::span<const FormRecord> forms, Task task,
                                            const SamplingOptions& options) {
  if (options.cap_per_form < 1) {
    throw Error(ErrorCode::kInvalidArgument, "cap_per_form must be at least 1");
  }
  const auto cap = static_cast<std::size_t>(options.cap_per_form);
  std::vector<TaskSample> out;
  for (std::size_t f = 0; f < forms.size(); ++f) {
    const auto& blocks = forms[f].form.blocks;
    std::vector<int> eligible;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (Eligible(blocks[i], task, options)) eligible.push_back(static_cast<int>(i) + 1);
    }
    if (eligible.size() > cap) {
      // Partial Fisher-Yates: the first `cap` slots are a uniform subset.
      Rng rng(MixSeed(options.seed, f));
      for (std::size_t k = 0; k < cap; ++k) {
        std::swap(eligible[k], eligible[k + rng.UniformInt(eligible.size() - k)]);
      }
      eligible.resize(cap);
      std::sort(eligible.begin(), eligible.end());
    }
    for (int i : eligible) out.push_back(MakeSample(forms[f], task, i));
  }
  return out;
}

void WriteTaskSamples(const std::filesystem::path& path, std::span<const TaskSample> samples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& s : samples) {
    Json j = Json::object();
    j["task"] = std::string(TaskKey(s.task));
    j["form_id"] = s.form_id;
    j["block_index"] = s.block_index;
    j["target"] = s.target;
    os << j.dump() << '\n';
  }
}

std::vector<TaskSample> ReadTaskSamples(const std::filesystem::path& path,
                                        std::span<const FormRecord> forms) {
  std::unordered_map<std::string, const FormRecord*> by_id;
  for (const auto& r : forms) by_id.emplace(r.id, &r);
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<TaskSample> out;
  for (std::string line; std::getline(is, line);) {
    if (line.empty()) continue;
    Json j = ParseDocument(line);
    auto task = ParseTask(j.value("task", ""));
    if (!task) throw Error(ErrorCode::kMalformedDocument, "bad task in " + path.string());
    auto it = by_id.find(j.value("form_id", ""));
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument, "sample refers to unknown form " + j.value("form_id", ""));
    }
    out.push_back(MakeSample(*it->second, *task, j.value("block_index", 0)));
  }
  return out;
}

std::optional<BlockType> PlantedType(std::string_view title, std::span<const KeywordRule> rules) {
  const std::vector<std::string> toks = Tokenize(title);
  for (const auto& rule : rules) {
    for (const auto& kw : rule.keywords) {
      const std::vector<std::string> pat = Tokenize(kw);
      if (pat.empty() || pat.size() > toks.size()) continue;
      for (std::size_t s = 0; s + pat.size() <= toks.size(); ++s) {
        if (std::equal(pat.begin(), pat.end(), toks.begin() + static_cast<std::ptrdiff_t>(s))) {
          return rule.type;
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<FormRecord> GenerateSyntheticCorpus(const SyntheticSpec& spec) {
  if (spec.n_forms < 0 || spec.topics.empty() || spec.organizations.empty() ||
      spec.min_blocks < 1 || spec.max_blocks < spec.min_blocks) {
    throw Error(ErrorCode::kInvalidArgument, "invalid synthetic corpus spec");
  }
  const std::vector<std::string> block_descriptions = {
      "this field is required .", "please be as specific as possible .",
      "answer to the best of your knowledge ."};
  const std::vector<std::string> closings = {
      "thank you for completing this form", "please note that all answers are confidential"};

  auto make_block = [&](const QuestionTemplate& q) {
    auto type = PlantedType(q.title, spec.rules);
    if (!type) {
      throw Error(ErrorCode::kInvalidArgument, "template title matches no rule: " + q.title);
    }
    Block b;
    b.type = *type;
    b.title = q.title;
    if (HasOptions(b.type)) b.options = q.options;
    if (b.type == BlockType::kLikert) {
      b.rows = q.rows;
      b.columns = q.columns;
    }
    return b;
  };

  std::vector<FormRecord> out;
  out.reserve(static_cast<std::size_t>(spec.n_forms));
  for (int n = 0; n < spec.n_forms; ++n) {
    Rng rng(MixSeed(spec.seed, static_cast<std::uint64_t>(n)));
    const TopicTemplate& topic = rng.Pick(spec.topics);
    Form form;
    form.title = rng.Pick(spec.organizations) + " " + rng.Pick(topic.form_titles);
    if (rng.Bernoulli(0.5)) form.title += " " + std::to_string(2018 + rng.UniformInt(9));
    if (!topic.descriptions.empty() && rng.Bernoulli(spec.form_description_prob)) {
      form.description = rng.Pick(topic.descriptions);
    }

    const int pool = static_cast<int>(topic.questions.size());
    const int hi = std::min(spec.max_blocks, pool);
    const int lo = std::min(spec.min_blocks, hi);
    const int k = lo + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(hi - lo + 1)));
    std::vector<int> picks(static_cast<std::size_t>(pool));
    for (int i = 0; i < pool; ++i) picks[static_cast<std::size_t>(i)] = i;
    rng.Shuffle(picks);
    picks.resize(static_cast<std::size_t>(k));
    std::sort(picks.begin(), picks.end());
    for (int p : picks) {
      Block b = make_block(topic.questions[static_cast<std::size_t>(p)]);
      if (rng.Bernoulli(spec.block_description_prob)) b.description = rng.Pick(block_descriptions);
      form.blocks.push_back(std::move(b));
    }

    if (!spec.neutral_titles.empty() && !spec.neutral_types.empty() &&
        rng.Bernoulli(spec.neutral_group_prob)) {
      std::vector<std::string> titles = spec.neutral_titles;
      rng.Shuffle(titles);
      const std::size_t g = std::min<std::size_t>(titles.size(), 2 + rng.UniformInt(2));
      const BlockType type = rng.Pick(spec.neutral_types);
      const auto at = static_cast<std::ptrdiff_t>(rng.UniformInt(form.blocks.size() + 1));
      std::vector<Block> group;
      for (std::size_t j = 0; j < g; ++j) {
        Block b;
        b.type = type;
        b.title = titles[j];
        group.push_back(std::move(b));
      }
      form.blocks.insert(form.blocks.begin() + at, group.begin(), group.end());
    }
    if (!topic.welcome.empty() && rng.Bernoulli(spec.welcome_prob)) {
      Block b;
      b.type = BlockType::kDescription;
      b.title = topic.welcome;
      form.blocks.insert(form.blocks.begin(), std::move(b));
    }
    if (rng.Bernoulli(0.15)) {
      Block b;
      b.type = BlockType::kDescription;
      b.title = rng.Pick(closings);
      form.blocks.push_back(std::move(b));
    }

    std::ostringstream id;
    id << "syn-" << std::setw(6) << std::setfill('0') << n;
    out.push_back({id.str(), std::move(form)});
  }
  return out;
}

}  // namespace formstruct
