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

#ifndef FORMSTRUCT_AUTOGRAD_HPP_
#define FORMSTRUCT_AUTOGRAD_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "formstruct/annotation.hpp"
#include "formstruct/rng.hpp"
#include "formstruct/struct_attention.hpp"

namespace formstruct::nn {

template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;  // same shape as value; zero until something flows in
  bool trainable = true;

  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }

  void EnsureGrad() {
    if (grad.rows() != value.rows() || grad.cols() != value.cols()) ZeroGrad();
  }

  template <typename Expr>
  void Accumulate(const Expr& g) {
    if (!trainable) return;
    EnsureGrad();
    grad += g;
  }
};

struct Var {
  int id = -1;
};

// Records a computation as a list of nodes; Backward() walks it in reverse.
// Parameters are not nodes: ops capture them and add their gradients
// straight into Parameter::grad.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  // A non-null `rng` with `dropout_rate` > 0 turns dropout on.
  explicit Tape(Rng* rng = nullptr, double dropout_rate = 0.0)
      : rng_(rng), dropout_rate_(rng != nullptr ? dropout_rate : 0.0) {}

  Var Constant(Matrix<T> value) { return Push(std::move(value), nullptr); }

  Var Push(Matrix<T> value, BackwardFn backward) {
    nodes_.push_back({std::move(value), Matrix<T>(), std::move(backward)});
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  const Matrix<T>& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  const Matrix<T>& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }

  // Gradient buffer of node `id`, zero-initialized on first access.
  Matrix<T>& grad(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0 && n.value.size() != 0) n.grad.setZero(n.value.rows(), n.value.cols());
    return n.grad;
  }
  Matrix<T>& grad(Var v) { return grad(v.id); }

  // Seeds d root / d root = 1 for a 1x1 root.
  void Backward(Var root) {
    grad(root).setOnes();
    for (int id = root.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (n.backward && n.grad.size() != 0) n.backward(*this, id);
    }
  }

  double dropout_rate() const { return dropout_rate_; }
  Rng* rng() const { return rng_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix<T> value;
    Matrix<T> grad;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  Rng* rng_;
  double dropout_rate_;
};

// Structural bias weights of one attention site in one layer.
template <typename T>
struct StructBiasWeights {
  Parameter<T>* type_table = nullptr;  // 9 x 9
  Parameter<T>* lambda_raw = nullptr;  // 1 x 1
  Parameter<T>* mu_raw = nullptr;      // 1 x 1
  Parameter<T>* same_block = nullptr;  // 1 x 1

  StructBiasParams<T> Values(AttentionVariant variant) const;
  void Accumulate(const StructBiasGrads<T>& g) const;
};

template <typename T>
struct AttentionBias {
  std::span<const TokenAnnotation> queries;
  std::span<const TokenAnnotation> keys;
  AttentionVariant variant = AttentionVariant::kHybrid;
  // One entry shared by all heads, or one per head.
  std::vector<StructBiasWeights<T>> weights;
};

template <typename T>
struct AttentionSpec {
  int n_heads = 1;
  bool causal = false;
  const AttentionBias<T>* bias = nullptr;  // null: plain scaled dot-product
};

// y = x W (+ b). W is in x out, b is 1 x out.
template <typename T>
Var Linear(Tape<T>& t, Var x, Parameter<T>& w, Parameter<T>* b);
template <typename T>
Var Add(Tape<T>& t, Var a, Var b);
template <typename T>
Var Scale(Tape<T>& t, Var x, T s);
template <typename T>
Var LayerNorm(Tape<T>& t, Var x, Parameter<T>& gamma, Parameter<T>& beta, T eps = T(1e-5));
// Exact (erf) GELU.
template <typename T>
Var Gelu(Tape<T>& t, Var x);
// Inverted dropout with the tape's rng; identity when dropout is off.
template <typename T>
Var Dropout(Tape<T>& t, Var x);
template <typename T>
Var Embedding(Tape<T>& t, Parameter<T>& table, std::span<const int> ids);
// Rows 0..n-1 of a position table.
template <typename T>
Var Positions(Tape<T>& t, Parameter<T>& table, int n);
// h E^T against a (vocab x d) table.
template <typename T>
Var TiedProjection(Tape<T>& t, Var h, Parameter<T>& table);
template <typename T>
Var SelectRow(Tape<T>& t, Var x, int row);
// scale * sum over positions with target != ignore of -log softmax(logits)[target].
template <typename T>
Var CrossEntropy(Tape<T>& t, Var logits, std::span<const int> targets, int ignore, T scale);
// Multi-head attention over already-projected q (n x d), k and v (m x d).
template <typename T>
Var Attention(Tape<T>& t, Var q, Var k, Var v, const AttentionSpec<T>& spec);

}  // namespace formstruct::nn

#endif  // FORMSTRUCT_AUTOGRAD_HPP_
