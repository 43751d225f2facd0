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

#include <doctest.h>

#include <cmath>
#include <random>

#include "formstruct/optim.hpp"

using namespace formstruct;

namespace {

using M = Matrix<double>;

nn::Parameter<double> Scalar(double value, double grad) {
  return {"p", M::Constant(1, 1, value), M::Constant(1, 1, grad), true};
}

// Scalar AdamW written out step by step.
struct ReferenceAdamW {
  double lr, b1, b2, eps, wd;
  double m = 0, v = 0;
  int t = 0;
  double Step(double p, double g) {
    ++t;
    p *= 1 - lr * wd;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    return p - lr * mhat / (std::sqrt(vhat) + eps);
  }
};

}  // namespace

TEST_CASE("first step moves each weight by the learning rate") {
  auto p = Scalar(1.0, 0.5), q = Scalar(1.0, -3.0);
  AdamW<double> opt({&p, &q}, {0.1, 0.9, 0.999, 1e-8, 0.0});
  opt.Step();
  CHECK(p.value(0, 0) == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(q.value(0, 0) == doctest::Approx(1.1).epsilon(1e-7));
  CHECK(opt.step() == 1);
  CHECK(opt.first_moment(0)(0, 0) == doctest::Approx(0.05));
  CHECK(opt.second_moment(1)(0, 0) == doctest::Approx(0.009));
}

TEST_CASE("matches a scalar reference over many steps") {
  std::mt19937 gen(4);
  std::normal_distribution<double> dist;
  const AdamWOptions o{0.01, 0.8, 0.95, 1e-6, 0.3};
  nn::Parameter<double> p{"p", M::Zero(2, 3), M::Zero(2, 3), true};
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = dist(gen);
  std::vector<ReferenceAdamW> ref(6, ReferenceAdamW{o.learning_rate, o.beta1, o.beta2, o.epsilon, o.weight_decay});
  std::vector<double> expected(p.value.data(), p.value.data() + 6);
  AdamW<double> opt({&p}, o);
  for (int step = 0; step < 25; ++step) {
    for (Eigen::Index i = 0; i < 6; ++i) {
      p.grad.data()[i] = dist(gen);
      expected[static_cast<std::size_t>(i)] = ref[static_cast<std::size_t>(i)].Step(expected[static_cast<std::size_t>(i)], p.grad.data()[i]);
    }
    opt.Step();
  }
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(p.value.data()[i] == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("decoupled weight decay") {
  auto p = Scalar(2.0, 0.0);
  AdamW<double> opt({&p}, {0.1, 0.9, 0.999, 1e-8, 0.5});
  opt.Step();
  CHECK(p.value(0, 0) == doctest::Approx(2.0 * (1 - 0.1 * 0.5)).epsilon(1e-12));

  auto still = Scalar(2.0, 0.0);
  AdamW<double> plain({&still}, {0.1, 0.9, 0.999, 1e-8, 0.0});
  plain.Step();
  CHECK(still.value(0, 0) == 2.0);
}

TEST_CASE("frozen or gradient-free parameters are skipped") {
  auto frozen = Scalar(1.0, 5.0);
  frozen.trainable = false;
  nn::Parameter<double> untouched{"u", M::Ones(2, 2), M(), true};
  AdamW<double> opt({&frozen, &untouched}, {0.1, 0.9, 0.999, 1e-8, 0.5});
  opt.Step();
  CHECK(frozen.value(0, 0) == 1.0);
  CHECK(untouched.value == M::Ones(2, 2));
}

TEST_CASE("gradient clipping") {
  auto a = Scalar(0.0, 3.0), b = Scalar(0.0, 4.0);
  std::vector<nn::Parameter<double>*> ps = {&a, &b};
  CHECK(ClipGradNorm<double>(ps, 10.0) == doctest::Approx(5.0));
  CHECK(a.grad(0, 0) == 3.0);
  CHECK(ClipGradNorm<double>(ps, 1.0) == doctest::Approx(5.0));
  CHECK(a.grad(0, 0) == doctest::Approx(3.0 / (5.0 + 1e-6)).epsilon(1e-12));
  CHECK(b.grad(0, 0) == doctest::Approx(4.0 / (5.0 + 1e-6)).epsilon(1e-12));
  CHECK(std::hypot(a.grad(0, 0), b.grad(0, 0)) < 1.0);

  auto frozen = Scalar(0.0, 100.0);
  frozen.trainable = false;
  std::vector<nn::Parameter<double>*> with_frozen = {&a, &frozen};
  CHECK(ClipGradNorm<double>(with_frozen, 1.0) == doctest::Approx(3.0 / (5.0 + 1e-6)));
  CHECK(frozen.grad(0, 0) == 100.0);
}
