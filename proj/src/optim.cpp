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

#include "formstruct/optim.hpp"

#include <cmath>

namespace formstruct {

template <typename T>
AdamW<T>::AdamW(std::vector<nn::Parameter<T>*> params, AdamWOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto* p : params_) {
    m_.push_back(Matrix<T>::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix<T>::Zero(p->value.rows(), p->value.cols()));
  }
}

template <typename T>
void AdamW<T>::Step() {
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const T lr = static_cast<T>(options_.learning_rate);
  const T correction1 = static_cast<T>(1.0 - std::pow(b1, static_cast<double>(step_)));
  const T correction2_sqrt = static_cast<T>(std::sqrt(1.0 - std::pow(b2, static_cast<double>(step_))));
  const T step_size = lr / correction1;
  const T eps = static_cast<T>(options_.epsilon);
  const T decay = static_cast<T>(1.0 - options_.learning_rate * options_.weight_decay);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter<T>& p = *params_[i];
    if (!p.trainable || p.grad.size() != p.value.size()) continue;
    if (options_.weight_decay != 0.0) p.value *= decay;
    m_[i] = static_cast<T>(b1) * m_[i] + static_cast<T>(1.0 - b1) * p.grad;
    v_[i] = static_cast<T>(b2) * v_[i] + static_cast<T>(1.0 - b2) * p.grad.cwiseProduct(p.grad);
    const auto denom = (v_[i].array().sqrt() / correction2_sqrt) + eps;
    p.value.array() -= step_size * m_[i].array() / denom;
  }
}

template <typename T>
double ClipGradNorm(std::span<nn::Parameter<T>* const> params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) {
    if (p->trainable && p->grad.size() != 0) sq += p->grad.template cast<double>().squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const T scale = static_cast<T>(max_norm / (norm + 1e-6));
    for (auto* p : params) {
      if (p->trainable && p->grad.size() != 0) p->grad *= scale;
    }
  }
  return norm;
}

template class AdamW<float>;
template class AdamW<double>;
template double ClipGradNorm(std::span<nn::Parameter<float>* const>, double);
template double ClipGradNorm(std::span<nn::Parameter<double>* const>, double);

}  // namespace formstruct
