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

#include "formstruct/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "formstruct/error.hpp"
#include "formstruct/tokenizer.hpp"

namespace formstruct {

namespace {

constexpr double kInitStd = 0.02;

int ToInt(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "model config: " + key + " is not an integer: " + value);
}

double ToDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "model config: " + key + " is not a number: " + value);
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::kInvalidArgument, "model config: " + key + " is not a boolean: " + value);
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ModelConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0) {
    fail("d_model must be a positive multiple of n_heads");
  }
  if (encoder_layers < 0 || decoder_layers < 0) fail("layer counts must be non-negative");
  if (ffn_dim < 1) fail("ffn_dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (max_source_len < 2 || max_target_len < 2) fail("sequence limits must be at least 2");
  if (vocab_size <= static_cast<int>(kFirstCorpusToken)) fail("vocab_size must exceed the special tokens");
}

std::map<std::string, std::string> ModelConfig::ToMap() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"d_model", std::to_string(d_model)},
      {"n_heads", std::to_string(n_heads)},
      {"encoder_layers", std::to_string(encoder_layers)},
      {"decoder_layers", std::to_string(decoder_layers)},
      {"ffn_dim", std::to_string(ffn_dim)},
      {"dropout", FormatDouble(dropout)},
      {"max_source_len", std::to_string(max_source_len)},
      {"max_target_len", std::to_string(max_target_len)},
      {"vocab_size", std::to_string(vocab_size)},
      {"variant", std::string(VariantKey(variant))},
      {"encoder_struct", b(sites.encoder_self)},
      {"decoder_self_struct", b(sites.decoder_self)},
      {"decoder_cross_struct", b(sites.decoder_cross)},
      {"per_head_bias", b(per_head_bias)},
  };
}

ModelConfig ModelConfig::FromMap(const std::map<std::string, std::string>& kv) {
  ModelConfig c;
  for (const auto& [k, v] : kv) {
    if (k == "d_model") c.d_model = ToInt(k, v);
    else if (k == "n_heads") c.n_heads = ToInt(k, v);
    else if (k == "encoder_layers") c.encoder_layers = ToInt(k, v);
    else if (k == "decoder_layers") c.decoder_layers = ToInt(k, v);
    else if (k == "ffn_dim") c.ffn_dim = ToInt(k, v);
    else if (k == "dropout") c.dropout = ToDouble(k, v);
    else if (k == "max_source_len") c.max_source_len = ToInt(k, v);
    else if (k == "max_target_len") c.max_target_len = ToInt(k, v);
    else if (k == "vocab_size") c.vocab_size = ToInt(k, v);
    else if (k == "variant") {
      const auto parsed = ParseVariant(v);
      if (!parsed) throw Error(ErrorCode::kInvalidArgument, "unknown attention variant: " + v);
      c.variant = *parsed;
    } else if (k == "encoder_struct") c.sites.encoder_self = ToBool(k, v);
    else if (k == "decoder_self_struct") c.sites.decoder_self = ToBool(k, v);
    else if (k == "decoder_cross_struct") c.sites.decoder_cross = ToBool(k, v);
    else if (k == "per_head_bias") c.per_head_bias = ToBool(k, v);
  }
  return c;
}

std::vector<TokenAnnotation> TargetAnnotations(TokenRole role, int block_index, std::size_t n) {
  return std::vector<TokenAnnotation>(n, TokenAnnotation{role, block_index});
}

template <typename T>
nn::Parameter<T>* Seq2SeqModel<T>::Add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (by_name_.count(name) != 0) throw Error(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  storage_.push_back(nn::Parameter<T>{name, Matrix<T>::Zero(rows, cols), Matrix<T>(), true});
  nn::Parameter<T>* p = &storage_.back();
  ordered_.push_back(p);
  by_name_.emplace(std::move(name), p);
  return p;
}

template <typename T>
nn::Parameter<T>* Seq2SeqModel<T>::AddNormal(std::string name, Eigen::Index rows, Eigen::Index cols) {
  nn::Parameter<T>* p = Add(std::move(name), rows, cols);
  for (Eigen::Index i = 0; i < p->value.size(); ++i) {
    p->value.data()[i] = static_cast<T>(init_rng_.Normal(0.0, kInitStd));
  }
  return p;
}

template <typename T>
typename Seq2SeqModel<T>::Norm Seq2SeqModel<T>::MakeNorm(const std::string& prefix) {
  Norm n;
  n.gamma = Add(prefix + ".weight", 1, config_.d_model);
  n.gamma->value.setOnes();
  n.beta = Add(prefix + ".bias", 1, config_.d_model);
  return n;
}

template <typename T>
typename Seq2SeqModel<T>::AttentionBlock Seq2SeqModel<T>::MakeAttention(const std::string& prefix) {
  const int d = config_.d_model;
  AttentionBlock a;
  a.wq = AddNormal(prefix + ".q_proj.weight", d, d);
  a.bq = Add(prefix + ".q_proj.bias", 1, d);
  a.wk = AddNormal(prefix + ".k_proj.weight", d, d);
  a.bk = Add(prefix + ".k_proj.bias", 1, d);
  a.wv = AddNormal(prefix + ".v_proj.weight", d, d);
  a.bv = Add(prefix + ".v_proj.bias", 1, d);
  a.wo = AddNormal(prefix + ".out_proj.weight", d, d);
  a.bo = Add(prefix + ".out_proj.bias", 1, d);
  const int copies = config_.per_head_bias ? config_.n_heads : 1;
  for (int h = 0; h < copies; ++h) {
    const std::string base =
        prefix + (config_.per_head_bias ? ".struct.h" + std::to_string(h) : std::string(".struct"));
    nn::StructBiasWeights<T> w;
    w.type_table = Add(base + ".type_table", kNumTokenRoles, kNumTokenRoles);
    w.lambda_raw = Add(base + ".lambda_raw", 1, 1);
    w.lambda_raw->value(0, 0) = InversePositiveReparam<T>(T(1));
    w.mu_raw = Add(base + ".mu_raw", 1, 1);
    w.mu_raw->value(0, 0) = InversePositiveReparam<T>(T(0.1));
    w.same_block = Add(base + ".same_block_bias", 1, 1);
    a.bias.push_back(w);
  }
  return a;
}

template <typename T>
typename Seq2SeqModel<T>::FeedForward Seq2SeqModel<T>::MakeFeedForward(const std::string& prefix) {
  FeedForward f;
  f.w1 = AddNormal(prefix + ".fc1.weight", config_.d_model, config_.ffn_dim);
  f.b1 = Add(prefix + ".fc1.bias", 1, config_.ffn_dim);
  f.w2 = AddNormal(prefix + ".fc2.weight", config_.ffn_dim, config_.d_model);
  f.b2 = Add(prefix + ".fc2.bias", 1, config_.d_model);
  return f;
}

template <typename T>
Seq2SeqModel<T>::Seq2SeqModel(const ModelConfig& config, std::uint64_t seed)
    : config_(config), init_rng_(seed) {
  config_.Validate();
  const int d = config_.d_model;
  embed_tokens_ = AddNormal("embed_tokens", config_.vocab_size, d);
  encoder_positions_ = AddNormal("encoder.embed_positions", config_.max_source_len, d);
  encoder_embed_norm_ = MakeNorm("encoder.layernorm_embedding");
  for (int l = 0; l < config_.encoder_layers; ++l) {
    const std::string p = "encoder.layers." + std::to_string(l);
    EncoderLayer layer;
    layer.self_attn = MakeAttention(p + ".self_attn");
    layer.self_norm = MakeNorm(p + ".self_attn_layer_norm");
    layer.ffn = MakeFeedForward(p);
    layer.final_norm = MakeNorm(p + ".final_layer_norm");
    encoder_.push_back(layer);
  }
  decoder_positions_ = AddNormal("decoder.embed_positions", config_.decoder_positions(), d);
  decoder_embed_norm_ = MakeNorm("decoder.layernorm_embedding");
  for (int l = 0; l < config_.decoder_layers; ++l) {
    const std::string p = "decoder.layers." + std::to_string(l);
    DecoderLayer layer;
    layer.self_attn = MakeAttention(p + ".self_attn");
    layer.self_norm = MakeNorm(p + ".self_attn_layer_norm");
    layer.cross_attn = MakeAttention(p + ".encoder_attn");
    layer.cross_norm = MakeNorm(p + ".encoder_attn_layer_norm");
    layer.ffn = MakeFeedForward(p);
    layer.final_norm = MakeNorm(p + ".final_layer_norm");
    decoder_.push_back(layer);
  }
  class_weight_ = AddNormal("classification_head.weight", d, kNumBlockTypes);
  class_bias_ = Add("classification_head.bias", 1, kNumBlockTypes);
}

template <typename T>
nn::Parameter<T>& Seq2SeqModel<T>::parameter(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "no parameter named " + std::string(name));
  }
  return *it->second;
}

template <typename T>
void Seq2SeqModel<T>::ZeroGrad() {
  for (auto* p : ordered_) p->ZeroGrad();
}

template <typename T>
std::vector<Matrix<T>> Seq2SeqModel<T>::Snapshot() const {
  std::vector<Matrix<T>> out;
  out.reserve(ordered_.size());
  for (const auto* p : ordered_) out.push_back(p->value);
  return out;
}

template <typename T>
void Seq2SeqModel<T>::Restore(const std::vector<Matrix<T>>& values) {
  if (values.size() != ordered_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "snapshot has a different parameter count");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].rows() != ordered_[i]->value.rows() || values[i].cols() != ordered_[i]->value.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "snapshot shape differs for " + ordered_[i]->name);
    }
    ordered_[i]->value = values[i];
  }
}

template <typename T>
nn::Var Seq2SeqModel<T>::ApplyNorm(nn::Tape<T>& t, const Norm& norm, nn::Var x) {
  return nn::LayerNorm<T>(t, x, *norm.gamma, *norm.beta);
}

template <typename T>
nn::Var Seq2SeqModel<T>::AttentionSublayer(nn::Tape<T>& t, const AttentionBlock& block,
                                           nn::Var query_in, nn::Var memory_in, bool causal,
                                           bool structural,
                                           std::span<const TokenAnnotation> queries,
                                           std::span<const TokenAnnotation> keys) {
  const nn::Var q = nn::Linear<T>(t, query_in, *block.wq, block.bq);
  const nn::Var k = nn::Linear<T>(t, memory_in, *block.wk, block.bk);
  const nn::Var v = nn::Linear<T>(t, memory_in, *block.wv, block.bv);
  nn::AttentionBias<T> bias{queries, keys, config_.variant, block.bias};
  nn::AttentionSpec<T> spec{config_.n_heads, causal, structural ? &bias : nullptr};
  const nn::Var o = nn::Attention<T>(t, q, k, v, spec);
  return nn::Linear<T>(t, o, *block.wo, block.bo);
}

template <typename T>
nn::Var Seq2SeqModel<T>::FeedForwardSublayer(nn::Tape<T>& t, const FeedForward& ffn, nn::Var x) {
  nn::Var h = nn::Gelu<T>(t, nn::Linear<T>(t, x, *ffn.w1, ffn.b1));
  h = nn::Dropout<T>(t, h);
  return nn::Linear<T>(t, h, *ffn.w2, ffn.b2);
}

template <typename T>
nn::Var Seq2SeqModel<T>::Encode(nn::Tape<T>& t, std::span<const int> ids,
                                std::span<const TokenAnnotation> annotations) {
  const int n = static_cast<int>(ids.size());
  if (n == 0 || n > config_.max_source_len) {
    throw Error(ErrorCode::kContextOverflow,
                "encoder input length " + std::to_string(n) + " outside [1, " +
                    std::to_string(config_.max_source_len) + "]");
  }
  if (annotations.size() != ids.size()) {
    throw Error(ErrorCode::kAnnotationMismatch, "encoder ids and annotations differ in length");
  }
  nn::Var x = nn::Add<T>(t, nn::Embedding<T>(t, *embed_tokens_, ids),
                         nn::Positions<T>(t, *encoder_positions_, n));
  x = ApplyNorm(t, encoder_embed_norm_, x);
  for (const auto& layer : encoder_) {
    const nn::Var a = AttentionSublayer(t, layer.self_attn, x, x, false, config_.sites.encoder_self,
                                        annotations, annotations);
    x = ApplyNorm(t, layer.self_norm, nn::Add<T>(t, x, a));
    x = ApplyNorm(t, layer.final_norm, nn::Add<T>(t, x, FeedForwardSublayer(t, layer.ffn, x)));
  }
  return x;
}

template <typename T>
nn::Var Seq2SeqModel<T>::Decode(nn::Tape<T>& t, nn::Var memory,
                                std::span<const TokenAnnotation> memory_annotations,
                                std::span<const int> ids,
                                std::span<const TokenAnnotation> annotations) {
  const int n = static_cast<int>(ids.size());
  if (n == 0 || n > config_.decoder_positions()) {
    throw Error(ErrorCode::kContextOverflow,
                "decoder input length " + std::to_string(n) + " outside [1, " +
                    std::to_string(config_.decoder_positions()) + "]");
  }
  if (annotations.size() != ids.size() ||
      static_cast<Eigen::Index>(memory_annotations.size()) != t.value(memory).rows()) {
    throw Error(ErrorCode::kAnnotationMismatch, "decoder ids and annotations differ in length");
  }
  nn::Var x = nn::Add<T>(t, nn::Embedding<T>(t, *embed_tokens_, ids),
                         nn::Positions<T>(t, *decoder_positions_, n));
  x = ApplyNorm(t, decoder_embed_norm_, x);
  for (const auto& layer : decoder_) {
    const nn::Var a = AttentionSublayer(t, layer.self_attn, x, x, true, config_.sites.decoder_self,
                                        annotations, annotations);
    x = ApplyNorm(t, layer.self_norm, nn::Add<T>(t, x, a));
    const nn::Var c = AttentionSublayer(t, layer.cross_attn, x, memory, false,
                                        config_.sites.decoder_cross, annotations, memory_annotations);
    x = ApplyNorm(t, layer.cross_norm, nn::Add<T>(t, x, c));
    x = ApplyNorm(t, layer.final_norm, nn::Add<T>(t, x, FeedForwardSublayer(t, layer.ffn, x)));
  }
  return x;
}

template <typename T>
nn::Var Seq2SeqModel<T>::LmLogits(nn::Tape<T>& t, nn::Var hidden) {
  return nn::TiedProjection<T>(t, hidden, *embed_tokens_);
}

template <typename T>
nn::Var Seq2SeqModel<T>::ClassLogits(nn::Tape<T>& t, nn::Var hidden) {
  const int last = static_cast<int>(t.value(hidden).rows()) - 1;
  return nn::Linear<T>(t, nn::SelectRow<T>(t, hidden, last), *class_weight_, class_bias_);
}

template <typename T>
Matrix<T> ForwardSeq2Seq(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                         std::span<const int> decoder_ids,
                         std::span<const TokenAnnotation> decoder_annotations) {
  nn::Tape<T> tape;
  const auto src_ids = source.ids();
  const auto src_ann = source.annotations();
  const nn::Var memory = model.Encode(tape, src_ids, src_ann);
  const nn::Var h = model.Decode(tape, memory, src_ann, decoder_ids, decoder_annotations);
  return tape.value(model.LmLogits(tape, h));
}

template <typename T>
std::array<T, kNumBlockTypes> ClassifyBlockType(Seq2SeqModel<T>& model,
                                                const AnnotatedSequence& source) {
  nn::Tape<T> tape;
  const auto ids = source.ids();
  const auto ann = source.annotations();
  const nn::Var memory = model.Encode(tape, ids, ann);
  const nn::Var h = model.Decode(tape, memory, ann, ids, ann);
  const Matrix<T>& logits = tape.value(model.ClassLogits(tape, h));
  std::array<T, kNumBlockTypes> out{};
  for (int c = 0; c < kNumBlockTypes; ++c) out[static_cast<std::size_t>(c)] = logits(0, c);
  return out;
}

template class Seq2SeqModel<float>;
template class Seq2SeqModel<double>;
template Matrix<float> ForwardSeq2Seq(Seq2SeqModel<float>&, const AnnotatedSequence&,
                                      std::span<const int>, std::span<const TokenAnnotation>);
template Matrix<double> ForwardSeq2Seq(Seq2SeqModel<double>&, const AnnotatedSequence&,
                                       std::span<const int>, std::span<const TokenAnnotation>);
template std::array<float, kNumBlockTypes> ClassifyBlockType(Seq2SeqModel<float>&,
                                                             const AnnotatedSequence&);
template std::array<double, kNumBlockTypes> ClassifyBlockType(Seq2SeqModel<double>&,
                                                              const AnnotatedSequence&);

}  // namespace formstruct
