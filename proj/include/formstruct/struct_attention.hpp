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

#ifndef FORMSTRUCT_STRUCT_ATTENTION_HPP_
#define FORMSTRUCT_STRUCT_ATTENTION_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "formstruct/annotation.hpp"

namespace formstruct {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Alternative structural attention designs.
//   Hybrid     L[role_q, role_k] + mu * exp(-lambda * d)
//   TypeOnly   L term only
//   DistOnly   decay term only
//   HybridStar L term + learned scalar when both tokens share a block
//   Mask       0 where attention is allowed, -inf elsewhere
enum class AttentionVariant { kHybrid, kTypeOnly, kDistOnly, kHybridStar, kMask };

std::string_view VariantKey(AttentionVariant v);  // hybrid|type|dist|hybridstar|mask
std::optional<AttentionVariant> ParseVariant(std::string_view key);

// softplus(raw) = ln(1 + e^raw), evaluated without overflow.
template <typename T>
T PositiveReparam(T raw) {
  return raw > T(0) ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
}

template <typename T>
T InversePositiveReparam(T value) {
  return value > T(30) ? value + std::log(-std::expm1(-value)) : std::log(std::expm1(value));
}

// d softplus / d raw.
template <typename T>
T Sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
struct StructBiasParams {
  Matrix<T> type_table = Matrix<T>::Zero(kNumTokenRoles, kNumTokenRoles);
  T lambda_raw = InversePositiveReparam<T>(T(1));
  T mu_raw = InversePositiveReparam<T>(T(0.1));
  T same_block_bias = T(0);
  AttentionVariant variant = AttentionVariant::kHybrid;

  T lambda() const { return PositiveReparam(lambda_raw); }
  T mu() const { return PositiveReparam(mu_raw); }
};

// Mask variant: a pair may attend iff it shares a block or either token is
// form-level text (title, its separator, or description).
inline bool MaskAllows(const TokenAnnotation& q, const TokenAnnotation& k) {
  return q.block_index == k.block_index || q.block_index <= kDescBlock ||
         k.block_index <= kDescBlock;
}

// Additive bias aligned with (query position, key position).
template <typename T>
Matrix<T> ComputeBias(std::span<const TokenAnnotation> queries,
                      std::span<const TokenAnnotation> keys, const StructBiasParams<T>& params);

template <typename T>
struct AttentionForward {
  Matrix<T> output;  // n x d_v
  Matrix<T> probs;   // softmax(A), n x m, before any dropout
};

// softmax(Q K^T / sqrt(d_k) + bias) V. Rows renormalize over finite entries;
// an all -inf row throws DegenerateRow. `keep` (optional, n x m) rescales
// the probabilities elementwise before multiplying by V (dropout).
template <typename T>
AttentionForward<T> StructuralAttention(const Matrix<T>& q, const Matrix<T>& k,
                                        const Matrix<T>& v, const Matrix<T>& bias,
                                        const Matrix<T>* keep = nullptr);

template <typename T>
struct AttentionBackward {
  Matrix<T> dq, dk, dv;
  Matrix<T> dscores;  // d loss / d A, which is also d loss / d bias
};

template <typename T>
AttentionBackward<T> StructuralAttentionBackward(const Matrix<T>& q, const Matrix<T>& k,
                                                 const Matrix<T>& v,
                                                 const AttentionForward<T>& forward,
                                                 const Matrix<T>& d_output,
                                                 const Matrix<T>* keep = nullptr);

template <typename T>
struct StructBiasGrads {
  Matrix<T> type_table = Matrix<T>::Zero(kNumTokenRoles, kNumTokenRoles);
  T lambda_raw = T(0);
  T mu_raw = T(0);
  T same_block_bias = T(0);
};

// Chain rule from d loss / d bias to the structural parameters, through the
// softplus reparameterization of lambda and mu.
template <typename T>
StructBiasGrads<T> BiasGradients(const Matrix<T>& upstream,
                                 std::span<const TokenAnnotation> queries,
                                 std::span<const TokenAnnotation> keys,
                                 const StructBiasParams<T>& params);

}  // namespace formstruct

#endif  // FORMSTRUCT_STRUCT_ATTENTION_HPP_
