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

#ifndef FORMSTRUCT_OPTIM_HPP_
#define FORMSTRUCT_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "formstruct/autograd.hpp"

namespace formstruct {

struct AdamWOptions {
  double learning_rate = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

// Adam with decoupled weight decay and bias correction. Parameters that are
// frozen or have never received a gradient are skipped.
template <typename T>
class AdamW {
 public:
  AdamW(std::vector<nn::Parameter<T>*> params, AdamWOptions options);

  void Step();
  std::int64_t step() const { return step_; }
  const AdamWOptions& options() const { return options_; }
  const Matrix<T>& first_moment(std::size_t i) const { return m_[i]; }
  const Matrix<T>& second_moment(std::size_t i) const { return v_[i]; }

 private:
  std::vector<nn::Parameter<T>*> params_;
  AdamWOptions options_;
  std::vector<Matrix<T>> m_;
  std::vector<Matrix<T>> v_;
  std::int64_t step_ = 0;
};

// Rescales all gradients so their joint L2 norm is at most `max_norm`;
// returns the norm before clipping.
template <typename T>
double ClipGradNorm(std::span<nn::Parameter<T>* const> params, double max_norm);

}  // namespace formstruct

#endif  // FORMSTRUCT_OPTIM_HPP_
