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

#include "formstruct/struct_attention.hpp"

#include <limits>

#include "formstruct/error.hpp"

namespace formstruct {
namespace {

bool UsesTypeTable(AttentionVariant v) {
  return v == AttentionVariant::kHybrid || v == AttentionVariant::kTypeOnly ||
         v == AttentionVariant::kHybridStar;
}

bool UsesDecay(AttentionVariant v) {
  return v == AttentionVariant::kHybrid || v == AttentionVariant::kDistOnly;
}

int RoleIndex(const TokenAnnotation& a) { return static_cast<int>(a.role); }

}  // namespace

std::string_view VariantKey(AttentionVariant v) {
  switch (v) {
    case AttentionVariant::kHybrid: return "hybrid";
    case AttentionVariant::kTypeOnly: return "type";
    case AttentionVariant::kDistOnly: return "dist";
    case AttentionVariant::kHybridStar: return "hybridstar";
    case AttentionVariant::kMask: return "mask";
  }
  return "?";
}

std::optional<AttentionVariant> ParseVariant(std::string_view key) {
  for (auto v : {AttentionVariant::kHybrid, AttentionVariant::kTypeOnly,
                 AttentionVariant::kDistOnly, AttentionVariant::kHybridStar,
                 AttentionVariant::kMask}) {
    if (VariantKey(v) == key) return v;
  }
  return std::nullopt;
}

template <typename T>
Matrix<T> ComputeBias(std::span<const TokenAnnotation> queries,
                      std::span<const TokenAnnotation> keys, const StructBiasParams<T>& params) {
  const auto n = static_cast<Eigen::Index>(queries.size());
  const auto m = static_cast<Eigen::Index>(keys.size());
  Matrix<T> bias = Matrix<T>::Zero(n, m);
  const AttentionVariant v = params.variant;

  if (v == AttentionVariant::kMask) {
    const T neg_inf = -std::numeric_limits<T>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!MaskAllows(queries[i], keys[j])) bias(i, j) = neg_inf;
      }
    }
    return bias;
  }

  const bool table = UsesTypeTable(v);
  const bool decay = UsesDecay(v);
  const T mu = params.mu();
  const T lambda = params.lambda();
  // Distances are small integers; cache exp(-lambda * d).
  std::vector<T> decay_by_distance;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int qr = RoleIndex(queries[i]);
    for (Eigen::Index j = 0; j < m; ++j) {
      T b = T(0);
      if (table) b += params.type_table(qr, RoleIndex(keys[j]));
      if (decay) {
        const auto d = static_cast<std::size_t>(BlockDistance(queries[i], keys[j]));
        while (decay_by_distance.size() <= d) {
          decay_by_distance.push_back(
              std::exp(-lambda * static_cast<T>(decay_by_distance.size())));
        }
        b += mu * decay_by_distance[d];
      }
      if (v == AttentionVariant::kHybridStar &&
          queries[i].block_index == keys[j].block_index) {
        b += params.same_block_bias;
      }
      bias(i, j) = b;
    }
  }
  return bias;
}

template <typename T>
AttentionForward<T> StructuralAttention(const Matrix<T>& q, const Matrix<T>& k,
                                        const Matrix<T>& v, const Matrix<T>& bias,
                                        const Matrix<T>* keep) {
  if (q.cols() != k.cols() || k.rows() != v.rows() || bias.rows() != q.rows() ||
      bias.cols() != k.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "attention operand shapes disagree");
  }
  const T scale = T(1) / std::sqrt(static_cast<T>(q.cols()));
  AttentionForward<T> out;
  out.probs.noalias() = q * k.transpose();
  out.probs *= scale;
  out.probs += bias;
  for (Eigen::Index i = 0; i < out.probs.rows(); ++i) {
    auto row = out.probs.row(i);
    const T max = row.maxCoeff();
    if (!std::isfinite(max)) {
      throw Error(ErrorCode::kDegenerateRow,
                  "attention row " + std::to_string(i) + " has no admissible key");
    }
    // Vectorized exp flushes -inf to a denormal, not zero.
    row = (row.array() == -std::numeric_limits<T>::infinity())
              .select(T(0), (row.array() - max).exp());
    row /= row.sum();
  }
  if (keep != nullptr) {
    out.output.noalias() = out.probs.cwiseProduct(*keep) * v;
  } else {
    out.output.noalias() = out.probs * v;
  }
  return out;
}

template <typename T>
AttentionBackward<T> StructuralAttentionBackward(const Matrix<T>& q, const Matrix<T>& k,
                                                 const Matrix<T>& v,
                                                 const AttentionForward<T>& forward,
                                                 const Matrix<T>& d_output,
                                                 const Matrix<T>* keep) {
  const T scale = T(1) / std::sqrt(static_cast<T>(q.cols()));
  const Matrix<T>& p = forward.probs;
  AttentionBackward<T> g;
  Matrix<T> dp;
  if (keep != nullptr) {
    g.dv.noalias() = p.cwiseProduct(*keep).transpose() * d_output;
    dp.noalias() = d_output * v.transpose();
    dp = dp.cwiseProduct(*keep);
  } else {
    g.dv.noalias() = p.transpose() * d_output;
    dp.noalias() = d_output * v.transpose();
  }
  // Softmax Jacobian: dA = P * (dP - rowsum(dP * P)).
  const Eigen::Matrix<T, Eigen::Dynamic, 1> dots = p.cwiseProduct(dp).rowwise().sum();
  g.dscores = p.cwiseProduct(dp.colwise() - dots);
  g.dq.noalias() = g.dscores * k;
  g.dq *= scale;
  g.dk.noalias() = g.dscores.transpose() * q;
  g.dk *= scale;
  return g;
}

template <typename T>
StructBiasGrads<T> BiasGradients(const Matrix<T>& upstream,
                                 std::span<const TokenAnnotation> queries,
                                 std::span<const TokenAnnotation> keys,
                                 const StructBiasParams<T>& params) {
  StructBiasGrads<T> g;
  const AttentionVariant v = params.variant;
  if (v == AttentionVariant::kMask) return g;
  const bool table = UsesTypeTable(v);
  const bool decay = UsesDecay(v);
  const T mu = params.mu();
  const T lambda = params.lambda();
  T d_mu = T(0);
  T d_lambda = T(0);
  for (Eigen::Index i = 0; i < upstream.rows(); ++i) {
    const int qr = RoleIndex(queries[i]);
    for (Eigen::Index j = 0; j < upstream.cols(); ++j) {
      const T u = upstream(i, j);
      if (u == T(0)) continue;
      if (table) g.type_table(qr, RoleIndex(keys[j])) += u;
      if (decay) {
        const T d = static_cast<T>(BlockDistance(queries[i], keys[j]));
        const T e = std::exp(-lambda * d);
        d_mu += u * e;
        d_lambda -= u * mu * d * e;
      }
      if (v == AttentionVariant::kHybridStar &&
          queries[i].block_index == keys[j].block_index) {
        g.same_block_bias += u;
      }
    }
  }
  g.mu_raw = d_mu * Sigmoid(params.mu_raw);
  g.lambda_raw = d_lambda * Sigmoid(params.lambda_raw);
  return g;
}

#define FORMSTRUCT_INSTANTIATE(T)                                                         \
  template Matrix<T> ComputeBias<T>(std::span<const TokenAnnotation>,                     \
                                    std::span<const TokenAnnotation>,                     \
                                    const StructBiasParams<T>&);                          \
  template AttentionForward<T> StructuralAttention<T>(const Matrix<T>&, const Matrix<T>&, \
                                                      const Matrix<T>&, const Matrix<T>&, \
                                                      const Matrix<T>*);                  \
  template AttentionBackward<T> StructuralAttentionBackward<T>(                           \
      const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, const AttentionForward<T>&,   \
      const Matrix<T>&, const Matrix<T>*);                                                \
  template StructBiasGrads<T> BiasGradients<T>(const Matrix<T>&,                          \
                                               std::span<const TokenAnnotation>,          \
                                               std::span<const TokenAnnotation>,          \
                                               const StructBiasParams<T>&);

FORMSTRUCT_INSTANTIATE(float)
FORMSTRUCT_INSTANTIATE(double)
#undef FORMSTRUCT_INSTANTIATE

}  // namespace formstruct
