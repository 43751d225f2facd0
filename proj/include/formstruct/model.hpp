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

#ifndef FORMSTRUCT_MODEL_HPP_
#define FORMSTRUCT_MODEL_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "formstruct/autograd.hpp"
#include "formstruct/serializer.hpp"
#include "formstruct/struct_attention.hpp"

namespace formstruct {

struct AttentionSites {
  bool encoder_self = true;
  bool decoder_self = true;
  bool decoder_cross = true;

  bool any() const { return encoder_self || decoder_self || decoder_cross; }
};

struct ModelConfig {
  int d_model = 128;
  int n_heads = 4;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int ffn_dim = 512;
  double dropout = 0.1;
  int max_source_len = 512;
  int max_target_len = 64;
  int vocab_size = 0;
  AttentionVariant variant = AttentionVariant::kHybrid;
  AttentionSites sites;
  bool per_head_bias = false;

  // Throws InvalidArgument (e.g. d_model not divisible by n_heads).
  void Validate() const;
  // Decoder positions cover both generation targets and the classification
  // path, which feeds the source sequence through the decoder.
  int decoder_positions() const { return std::max(max_source_len, max_target_len); }

  std::map<std::string, std::string> ToMap() const;
  // Unknown keys are ignored; missing keys keep their defaults.
  static ModelConfig FromMap(const std::map<std::string, std::string>& kv);
};

// Post-LN encoder-decoder transformer with learned absolute positions, GELU
// feed-forward layers, tied input/output embeddings and an 8-way block type
// head. Structural biases are per layer and per attention site.
template <typename T>
class Seq2SeqModel {
 public:
  Seq2SeqModel(const ModelConfig& config, std::uint64_t seed);
  Seq2SeqModel(const Seq2SeqModel&) = delete;
  Seq2SeqModel& operator=(const Seq2SeqModel&) = delete;

  const ModelConfig& config() const { return config_; }
  ModelConfig& mutable_config() { return config_; }

  // Stable creation order; names are unique.
  const std::vector<nn::Parameter<T>*>& parameters() const { return ordered_; }
  nn::Parameter<T>& parameter(std::string_view name) const;
  void ZeroGrad();

  std::vector<Matrix<T>> Snapshot() const;
  void Restore(const std::vector<Matrix<T>>& values);

  // Graph builders. Annotation spans are copied where retained.
  nn::Var Encode(nn::Tape<T>& t, std::span<const int> ids,
                 std::span<const TokenAnnotation> annotations);
  nn::Var Decode(nn::Tape<T>& t, nn::Var memory, std::span<const TokenAnnotation> memory_annotations,
                 std::span<const int> ids, std::span<const TokenAnnotation> annotations);
  nn::Var LmLogits(nn::Tape<T>& t, nn::Var hidden);
  // Linear head on the last row of `hidden`.
  nn::Var ClassLogits(nn::Tape<T>& t, nn::Var hidden);

 private:
  struct AttentionBlock {
    nn::Parameter<T>*wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
    std::vector<nn::StructBiasWeights<T>> bias;  // 1 or n_heads entries
  };
  struct FeedForward {
    nn::Parameter<T>*w1, *b1, *w2, *b2;
  };
  struct Norm {
    nn::Parameter<T>*gamma, *beta;
  };
  struct EncoderLayer {
    AttentionBlock self_attn;
    Norm self_norm;
    FeedForward ffn;
    Norm final_norm;
  };
  struct DecoderLayer {
    AttentionBlock self_attn;
    Norm self_norm;
    AttentionBlock cross_attn;
    Norm cross_norm;
    FeedForward ffn;
    Norm final_norm;
  };

  nn::Parameter<T>* Add(std::string name, Eigen::Index rows, Eigen::Index cols);
  nn::Parameter<T>* AddNormal(std::string name, Eigen::Index rows, Eigen::Index cols);
  AttentionBlock MakeAttention(const std::string& prefix);
  FeedForward MakeFeedForward(const std::string& prefix);
  Norm MakeNorm(const std::string& prefix);

  nn::Var AttentionSublayer(nn::Tape<T>& t, const AttentionBlock& block, nn::Var query_in,
                            nn::Var memory_in, bool causal, bool structural,
                            std::span<const TokenAnnotation> queries,
                            std::span<const TokenAnnotation> keys);
  nn::Var FeedForwardSublayer(nn::Tape<T>& t, const FeedForward& ffn, nn::Var x);
  nn::Var ApplyNorm(nn::Tape<T>& t, const Norm& norm, nn::Var x);

  ModelConfig config_;
  Rng init_rng_;
  std::deque<nn::Parameter<T>> storage_;
  std::vector<nn::Parameter<T>*> ordered_;
  std::map<std::string, nn::Parameter<T>*, std::less<>> by_name_;

  nn::Parameter<T>* embed_tokens_ = nullptr;
  nn::Parameter<T>* encoder_positions_ = nullptr;
  nn::Parameter<T>* decoder_positions_ = nullptr;
  Norm encoder_embed_norm_{};
  Norm decoder_embed_norm_{};
  std::vector<EncoderLayer> encoder_;
  std::vector<DecoderLayer> decoder_;
  nn::Parameter<T>* class_weight_ = nullptr;
  nn::Parameter<T>* class_bias_ = nullptr;
};

// Annotation track for generated targets: every position carries the
// expected output role and the predicted block's index.
std::vector<TokenAnnotation> TargetAnnotations(TokenRole role, int block_index, std::size_t n);

// Logits (len(decoder_ids) x vocab) for a teacher-forced decoder input.
template <typename T>
Matrix<T> ForwardSeq2Seq(Seq2SeqModel<T>& model, const AnnotatedSequence& source,
                         std::span<const int> decoder_ids,
                         std::span<const TokenAnnotation> decoder_annotations);

// The source feeds both encoder and decoder; the decoder's last position
// goes through the linear head.
template <typename T>
std::array<T, kNumBlockTypes> ClassifyBlockType(Seq2SeqModel<T>& model,
                                                const AnnotatedSequence& source);

}  // namespace formstruct

#endif  // FORMSTRUCT_MODEL_HPP_
