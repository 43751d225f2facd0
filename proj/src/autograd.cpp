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

#include "formstruct/autograd.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "formstruct/error.hpp"

namespace formstruct::nn {
namespace {

template <typename T>
Matrix<T> Scalar(T v) {
  Matrix<T> m(1, 1);
  m(0, 0) = v;
  return m;
}

template <typename T>
Matrix<T> CausalMask(Eigen::Index n, Eigen::Index m) {
  Matrix<T> mask = Matrix<T>::Zero(n, m);
  const T neg_inf = -std::numeric_limits<T>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) mask(i, j) = neg_inf;
  }
  return mask;
}

}  // namespace

template <typename T>
StructBiasParams<T> StructBiasWeights<T>::Values(AttentionVariant variant) const {
  StructBiasParams<T> p;
  p.type_table = type_table->value;
  p.lambda_raw = lambda_raw->value(0, 0);
  p.mu_raw = mu_raw->value(0, 0);
  p.same_block_bias = same_block->value(0, 0);
  p.variant = variant;
  return p;
}

template <typename T>
void StructBiasWeights<T>::Accumulate(const StructBiasGrads<T>& g) const {
  type_table->Accumulate(g.type_table);
  lambda_raw->Accumulate(Scalar(g.lambda_raw));
  mu_raw->Accumulate(Scalar(g.mu_raw));
  same_block->Accumulate(Scalar(g.same_block_bias));
}

template <typename T>
Var Linear(Tape<T>& t, Var x, Parameter<T>& w, Parameter<T>* b) {
  if (t.value(x).cols() != w.value.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "linear input width != " + w.name + " rows");
  }
  Matrix<T> y = t.value(x) * w.value;
  if (b != nullptr) y.rowwise() += b->value.row(0);
  return t.Push(std::move(y), [x, &w, b](Tape<T>& tape, int self) {
    const Matrix<T>& gy = tape.grad(self);
    w.Accumulate(tape.value(x).transpose() * gy);
    if (b != nullptr) b->Accumulate(gy.colwise().sum());
    tape.grad(x).noalias() += gy * w.value.transpose();
  });
}

template <typename T>
Var Add(Tape<T>& t, Var a, Var b) {
  if (t.value(a).rows() != t.value(b).rows() || t.value(a).cols() != t.value(b).cols()) {
    throw Error(ErrorCode::kShapeMismatch, "add operands differ in shape");
  }
  return t.Push(t.value(a) + t.value(b), [a, b](Tape<T>& tape, int self) {
    tape.grad(a) += tape.grad(self);
    tape.grad(b) += tape.grad(self);
  });
}

template <typename T>
Var Scale(Tape<T>& t, Var x, T s) {
  return t.Push(t.value(x) * s, [x, s](Tape<T>& tape, int self) {
    tape.grad(x) += tape.grad(self) * s;
  });
}

template <typename T>
Var LayerNorm(Tape<T>& t, Var x, Parameter<T>& gamma, Parameter<T>& beta, T eps) {
  const Matrix<T>& in = t.value(x);
  const Eigen::Index n = in.rows();
  const Eigen::Index d = in.cols();
  auto xhat = std::make_shared<Matrix<T>>(n, d);
  auto inv_sigma = std::make_shared<Eigen::Matrix<T, Eigen::Dynamic, 1>>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T mean = in.row(i).mean();
    const T var = (in.row(i).array() - mean).square().mean();
    (*inv_sigma)(i) = T(1) / std::sqrt(var + eps);
    xhat->row(i) = (in.row(i).array() - mean) * (*inv_sigma)(i);
  }
  Matrix<T> y = xhat->array().rowwise() * gamma.value.row(0).array();
  y.rowwise() += beta.value.row(0);
  return t.Push(std::move(y), [x, &gamma, &beta, xhat, inv_sigma](Tape<T>& tape, int self) {
    const Matrix<T>& gy = tape.grad(self);
    gamma.Accumulate(gy.cwiseProduct(*xhat).colwise().sum());
    beta.Accumulate(gy.colwise().sum());
    const Matrix<T> dxhat = gy.array().rowwise() * gamma.value.row(0).array();
    Matrix<T>& gx = tape.grad(x);
    for (Eigen::Index i = 0; i < dxhat.rows(); ++i) {
      const T m1 = dxhat.row(i).mean();
      const T m2 = dxhat.row(i).cwiseProduct(xhat->row(i)).mean();
      gx.row(i).array() +=
          (*inv_sigma)(i) * (dxhat.row(i).array() - m1 - xhat->row(i).array() * m2);
    }
  });
}

template <typename T>
Var Gelu(Tape<T>& t, Var x) {
  const T inv_sqrt2 = T(1) / std::sqrt(T(2));
  Matrix<T> y = t.value(x).unaryExpr(
      [inv_sqrt2](T v) { return T(0.5) * v * (T(1) + std::erf(v * inv_sqrt2)); });
  return t.Push(std::move(y), [x, inv_sqrt2](Tape<T>& tape, int self) {
    const T inv_sqrt_2pi = T(1) / std::sqrt(T(2) * T(M_PI));
    const Matrix<T> dydx = tape.value(x).unaryExpr([&](T v) {
      return T(0.5) * (T(1) + std::erf(v * inv_sqrt2)) +
             v * std::exp(T(-0.5) * v * v) * inv_sqrt_2pi;
    });
    tape.grad(x) += tape.grad(self).cwiseProduct(dydx);
  });
}

template <typename T>
Var Dropout(Tape<T>& t, Var x) {
  const double p = t.dropout_rate();
  if (p <= 0.0) return x;
  Rng& rng = *t.rng();
  const T keep_scale = T(1) / static_cast<T>(1.0 - p);
  auto mask = std::make_shared<Matrix<T>>(t.value(x).rows(), t.value(x).cols());
  for (Eigen::Index i = 0; i < mask->size(); ++i) {
    mask->data()[i] = rng.Uniform() < p ? T(0) : keep_scale;
  }
  return t.Push(t.value(x).cwiseProduct(*mask), [x, mask](Tape<T>& tape, int self) {
    tape.grad(x) += tape.grad(self).cwiseProduct(*mask);
  });
}

template <typename T>
Var Embedding(Tape<T>& t, Parameter<T>& table, std::span<const int> ids) {
  Matrix<T> y(static_cast<Eigen::Index>(ids.size()), table.value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.value.rows()) {
      throw Error(ErrorCode::kInvalidTokenId,
                  "id " + std::to_string(ids[i]) + " outside " + table.name);
    }
    y.row(static_cast<Eigen::Index>(i)) = table.value.row(ids[i]);
  }
  std::vector<int> copy(ids.begin(), ids.end());
  return t.Push(std::move(y), [&table, copy = std::move(copy)](Tape<T>& tape, int self) {
    if (!table.trainable) return;
    table.EnsureGrad();
    const Matrix<T>& gy = tape.grad(self);
    for (std::size_t i = 0; i < copy.size(); ++i) {
      table.grad.row(copy[i]) += gy.row(static_cast<Eigen::Index>(i));
    }
  });
}

template <typename T>
Var Positions(Tape<T>& t, Parameter<T>& table, int n) {
  if (n > table.value.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "sequence of length " + std::to_string(n) +
                                               " exceeds " + table.name);
  }
  return t.Push(table.value.topRows(n), [&table, n](Tape<T>& tape, int self) {
    if (!table.trainable) return;
    table.EnsureGrad();
    table.grad.topRows(n) += tape.grad(self);
  });
}

template <typename T>
Var TiedProjection(Tape<T>& t, Var h, Parameter<T>& table) {
  Matrix<T> y = t.value(h) * table.value.transpose();
  return t.Push(std::move(y), [h, &table](Tape<T>& tape, int self) {
    const Matrix<T>& gy = tape.grad(self);
    table.Accumulate(gy.transpose() * tape.value(h));
    tape.grad(h).noalias() += gy * table.value;
  });
}

template <typename T>
Var SelectRow(Tape<T>& t, Var x, int row) {
  if (row < 0 || row >= t.value(x).rows()) {
    throw Error(ErrorCode::kShapeMismatch, "row index out of range");
  }
  return t.Push(t.value(x).row(row), [x, row](Tape<T>& tape, int self) {
    tape.grad(x).row(row) += tape.grad(self).row(0);
  });
}

template <typename T>
Var CrossEntropy(Tape<T>& t, Var logits, std::span<const int> targets, int ignore, T scale) {
  const Matrix<T>& z = t.value(logits);
  if (static_cast<Eigen::Index>(targets.size()) != z.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "one target per logits row required");
  }
  auto probs = std::make_shared<Matrix<T>>(z.rows(), z.cols());
  T loss = T(0);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const T max = z.row(i).maxCoeff();
    probs->row(i) = (z.row(i).array() - max).exp();
    const T sum = probs->row(i).sum();
    probs->row(i) /= sum;
    const int target = targets[static_cast<std::size_t>(i)];
    if (target == ignore) continue;
    if (target < 0 || target >= z.cols()) {
      throw Error(ErrorCode::kInvalidTokenId, "target " + std::to_string(target));
    }
    loss += max + std::log(sum) - z(i, target);
  }
  std::vector<int> tg(targets.begin(), targets.end());
  return t.Push(Scalar(loss * scale),
                [logits, probs, tg = std::move(tg), ignore, scale](Tape<T>& tape, int self) {
                  const T g = tape.grad(self)(0, 0) * scale;
                  Matrix<T>& gz = tape.grad(logits);
                  for (Eigen::Index i = 0; i < gz.rows(); ++i) {
                    const int target = tg[static_cast<std::size_t>(i)];
                    if (target == ignore) continue;
                    gz.row(i) += g * probs->row(i);
                    gz(i, target) -= g;
                  }
                });
}

template <typename T>
Var Attention(Tape<T>& t, Var q, Var k, Var v, const AttentionSpec<T>& spec) {
  const Matrix<T>& qv = t.value(q);
  const Matrix<T>& kv = t.value(k);
  const Matrix<T>& vv = t.value(v);
  const Eigen::Index n = qv.rows();
  const Eigen::Index m = kv.rows();
  const Eigen::Index d = qv.cols();
  const int heads = spec.n_heads;
  if (heads < 1 || d % heads != 0 || kv.cols() != d || vv.cols() != d || vv.rows() != m) {
    throw Error(ErrorCode::kShapeMismatch, "attention shapes / head count disagree");
  }
  const Eigen::Index dh = d / heads;

  struct State {
    std::vector<StructBiasParams<T>> params;  // empty when unbiased
    std::vector<AttentionForward<T>> forward;
    std::vector<Matrix<T>> keep;
    std::vector<TokenAnnotation> queries, keys;
    std::vector<StructBiasWeights<T>> weights;
  };
  auto state = std::make_shared<State>();

  const AttentionBias<T>* bias = spec.bias;
  std::vector<Matrix<T>> biases;
  if (bias != nullptr) {
    if (static_cast<Eigen::Index>(bias->queries.size()) != n ||
        static_cast<Eigen::Index>(bias->keys.size()) != m) {
      throw Error(ErrorCode::kShapeMismatch, "annotations do not match attention operands");
    }
    state->queries.assign(bias->queries.begin(), bias->queries.end());
    state->keys.assign(bias->keys.begin(), bias->keys.end());
    state->weights = bias->weights;
    for (const auto& w : bias->weights) {
      state->params.push_back(w.Values(bias->variant));
      biases.push_back(ComputeBias<T>(state->queries, state->keys, state->params.back()));
    }
  }
  if (biases.empty()) biases.push_back(Matrix<T>::Zero(n, m));
  if (spec.causal) {
    const Matrix<T> mask = CausalMask<T>(n, m);
    for (auto& b : biases) b += mask;
  }

  const double p = t.dropout_rate();
  const T keep_scale = p > 0.0 ? T(1) / static_cast<T>(1.0 - p) : T(1);
  Matrix<T> out(n, d);
  for (int h = 0; h < heads; ++h) {
    const Matrix<T> qh = qv.middleCols(h * dh, dh);
    const Matrix<T> kh = kv.middleCols(h * dh, dh);
    const Matrix<T> vh = vv.middleCols(h * dh, dh);
    const Matrix<T>* keep = nullptr;
    if (p > 0.0) {
      Matrix<T> mask(n, m);
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = t.rng()->Uniform() < p ? T(0) : keep_scale;
      }
      state->keep.push_back(std::move(mask));
      keep = &state->keep.back();
    }
    const Matrix<T>& b = biases[biases.size() == 1 ? 0 : static_cast<std::size_t>(h)];
    state->forward.push_back(StructuralAttention<T>(qh, kh, vh, b, keep));
    out.middleCols(h * dh, dh) = state->forward.back().output;
  }

  return t.Push(std::move(out), [q, k, v, heads, dh, state](Tape<T>& tape, int self) {
    const Matrix<T> gy = tape.grad(self);
    const Matrix<T>& qv = tape.value(q);
    const Matrix<T>& kv = tape.value(k);
    const Matrix<T>& vv = tape.value(v);
    Matrix<T> dq = Matrix<T>::Zero(qv.rows(), qv.cols());
    Matrix<T> dk = Matrix<T>::Zero(kv.rows(), kv.cols());
    Matrix<T> dv = Matrix<T>::Zero(vv.rows(), vv.cols());
    const bool shared = state->params.size() == 1;
    Matrix<T> dbias_sum;
    for (int h = 0; h < heads; ++h) {
      const Matrix<T> qh = qv.middleCols(h * dh, dh);
      const Matrix<T> kh = kv.middleCols(h * dh, dh);
      const Matrix<T> vh = vv.middleCols(h * dh, dh);
      const Matrix<T>* keep = state->keep.empty() ? nullptr : &state->keep[static_cast<std::size_t>(h)];
      AttentionBackward<T> g = StructuralAttentionBackward<T>(
          qh, kh, vh, state->forward[static_cast<std::size_t>(h)],
          gy.middleCols(h * dh, dh), keep);
      dq.middleCols(h * dh, dh) = g.dq;
      dk.middleCols(h * dh, dh) = g.dk;
      dv.middleCols(h * dh, dh) = g.dv;
      if (state->params.empty()) continue;
      if (shared) {
        if (dbias_sum.size() == 0) {
          dbias_sum = std::move(g.dscores);
        } else {
          dbias_sum += g.dscores;
        }
      } else {
        const auto hi = static_cast<std::size_t>(h);
        state->weights[hi].Accumulate(
            BiasGradients<T>(g.dscores, state->queries, state->keys, state->params[hi]));
      }
    }
    if (shared) {
      state->weights[0].Accumulate(
          BiasGradients<T>(dbias_sum, state->queries, state->keys, state->params[0]));
    }
    tape.grad(q) += dq;
    tape.grad(k) += dk;
    tape.grad(v) += dv;
  });
}

#define FORMSTRUCT_INSTANTIATE(T)                                                           \
  template struct StructBiasWeights<T>;                                                     \
  template Var Linear<T>(Tape<T>&, Var, Parameter<T>&, Parameter<T>*);                      \
  template Var Add<T>(Tape<T>&, Var, Var);                                                  \
  template Var Scale<T>(Tape<T>&, Var, T);                                                  \
  template Var LayerNorm<T>(Tape<T>&, Var, Parameter<T>&, Parameter<T>&, T);                \
  template Var Gelu<T>(Tape<T>&, Var);                                                      \
  template Var Dropout<T>(Tape<T>&, Var);                                                   \
  template Var Embedding<T>(Tape<T>&, Parameter<T>&, std::span<const int>);                 \
  template Var Positions<T>(Tape<T>&, Parameter<T>&, int);                                  \
  template Var TiedProjection<T>(Tape<T>&, Var, Parameter<T>&);                             \
  template Var SelectRow<T>(Tape<T>&, Var, int);                                            \
  template Var CrossEntropy<T>(Tape<T>&, Var, std::span<const int>, int, T);                \
  template Var Attention<T>(Tape<T>&, Var, Var, Var, const AttentionSpec<T>&);

FORMSTRUCT_INSTANTIATE(float)
FORMSTRUCT_INSTANTIATE(double)
#undef FORMSTRUCT_INSTANTIATE

}  // namespace formstruct::nn
