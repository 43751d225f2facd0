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

#include "formstruct/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "formstruct/error.hpp"

namespace formstruct {

namespace {

constexpr char kMagic[] = "formstruct-checkpoint v1";

void WriteSection(std::ostream& out, const std::string& name,
                  const std::map<std::string, std::string>& kv) {
  out << '[' << name << "]\n";
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

[[noreturn]] void Malformed(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, path.string() + ": " + what);
}

std::uint32_t ToLittleEndian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << kMagic << '\n';
  WriteSection(out, "config", ckpt.config.ToMap());
  auto meta = ckpt.metadata;
  meta["step"] = std::to_string(ckpt.step);
  WriteSection(out, "meta", meta);
  out << "[vocab]\n" << ckpt.vocab.size() << '\n';
  for (const auto& tok : ckpt.vocab.tokens()) out << tok << '\n';
  out << "[tensors]\n" << ckpt.tensors.size() << '\n';
  for (const auto& t : ckpt.tensors) out << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
  out << "data\n";
  for (const auto& t : ckpt.tensors) {
    for (float f : t.data) {
      const std::uint32_t bits = ToLittleEndian(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingCheckpoint, "no checkpoint at " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMagic) Malformed(path, "bad magic line");

  auto read_section = [&](const std::string& name) {
    if (!std::getline(in, line) || line != "[" + name + "]") Malformed(path, "expected [" + name + "]");
    std::map<std::string, std::string> kv;
    while (in.peek() != '[' && std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) Malformed(path, "bad key=value line: " + line);
      kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
  };
  auto read_count = [&]() {
    if (!std::getline(in, line)) Malformed(path, "truncated header");
    try {
      return static_cast<std::size_t>(std::stoull(line));
    } catch (const std::exception&) {
      Malformed(path, "bad count: " + line);
    }
  };

  Checkpoint ckpt;
  ckpt.config = ModelConfig::FromMap(read_section("config"));
  ckpt.metadata = read_section("meta");
  if (auto it = ckpt.metadata.find("step"); it != ckpt.metadata.end()) {
    ckpt.step = std::stoll(it->second);
    ckpt.metadata.erase(it);
  }
  if (!std::getline(in, line) || line != "[vocab]") Malformed(path, "expected [vocab]");
  const std::size_t n_tokens = read_count();
  std::vector<std::string> tokens(n_tokens);
  for (auto& tok : tokens) {
    if (!std::getline(in, tok)) Malformed(path, "truncated vocabulary");
  }
  ckpt.vocab = Vocab::FromTokens(std::move(tokens));
  if (!std::getline(in, line) || line != "[tensors]") Malformed(path, "expected [tensors]");
  const std::size_t n_tensors = read_count();
  for (std::size_t i = 0; i < n_tensors; ++i) {
    if (!std::getline(in, line)) Malformed(path, "truncated manifest");
    std::istringstream ls(line);
    NamedTensor t;
    if (!(ls >> t.name >> t.rows >> t.cols) || t.rows < 0 || t.cols < 0) {
      Malformed(path, "bad manifest line: " + line);
    }
    ckpt.tensors.push_back(std::move(t));
  }
  if (!std::getline(in, line) || line != "data") Malformed(path, "expected data marker");
  for (auto& t : ckpt.tensors) {
    t.data.resize(static_cast<std::size_t>(t.rows) * static_cast<std::size_t>(t.cols));
    for (float& f : t.data) {
      std::uint32_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof(bits))) Malformed(path, "truncated tensor data");
      f = std::bit_cast<float>(ToLittleEndian(bits));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) Malformed(path, "trailing bytes after tensor data");
  return ckpt;
}

template <typename T>
Checkpoint MakeCheckpoint(const Seq2SeqModel<T>& model, const Vocab& vocab, std::int64_t step) {
  Checkpoint ckpt;
  ckpt.config = model.config();
  ckpt.vocab = vocab;
  ckpt.step = step;
  for (const auto* p : model.parameters()) {
    NamedTensor t{p->name, static_cast<int>(p->value.rows()), static_cast<int>(p->value.cols()), {}};
    t.data.reserve(static_cast<std::size_t>(p->value.size()));
    for (Eigen::Index i = 0; i < p->value.size(); ++i) t.data.push_back(static_cast<float>(p->value.data()[i]));
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

template <typename T>
void LoadParameters(Seq2SeqModel<T>& model, const Checkpoint& ckpt) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : ckpt.tensors) by_name[t.name] = &t;
  for (auto* p : model.parameters()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint lacks parameter " + p->name);
    }
    const NamedTensor& t = *it->second;
    if (t.rows != p->value.rows() || t.cols != p->value.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint shape differs for " + p->name);
    }
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      p->value.data()[i] = static_cast<T>(t.data[static_cast<std::size_t>(i)]);
    }
  }
}

template Checkpoint MakeCheckpoint(const Seq2SeqModel<float>&, const Vocab&, std::int64_t);
template Checkpoint MakeCheckpoint(const Seq2SeqModel<double>&, const Vocab&, std::int64_t);
template void LoadParameters(Seq2SeqModel<float>&, const Checkpoint&);
template void LoadParameters(Seq2SeqModel<double>&, const Checkpoint&);

}  // namespace formstruct
