// Copyright 2026 The vcl Authors. All Rights Reserved.
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

#include "vcl/training/optimizer.hpp"

#include "vcl/core/errors.hpp"

#include <cmath>

namespace vcl {

void Sgd::step(std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    if (momentum_ == 0.0) {
      p->value -= lr_ * p->grad;
      continue;
    }
    auto [it, fresh] = velocity_.try_emplace(p, Matrix::Zero(p->value.rows(), p->value.cols()));
    it->second = momentum_ * it->second + p->grad;
    p->value -= lr_ * it->second;
  }
  ++steps_;
}

void Adam::step(std::span<Parameter* const> params) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, double(steps_));
  const double c2 = 1.0 - std::pow(beta2_, double(steps_));
  for (Parameter* p : params) {
    auto [it, fresh] = moments_.try_emplace(
        p, Matrix::Zero(p->value.rows(), p->value.cols()),
        Matrix::Zero(p->value.rows(), p->value.cols()));
    auto& [m, v] = it->second;
    if (!same_shape(m, p->value)) {
      m = Matrix::Zero(p->value.rows(), p->value.cols());
      v = Matrix::Zero(p->value.rows(), p->value.cols());
    }
    m = beta1_ * m + (1.0 - beta1_) * p->grad;
    v = beta2_ * v + (1.0 - beta2_) * p->grad.cwiseProduct(p->grad);
    p->value.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSettings& s) {
  if (s.method == "sgd") return std::make_unique<Sgd>(s.learning_rate, s.momentum);
  if (s.method == "adam") return std::make_unique<Adam>(s.learning_rate);
  throw ConfigError("unknown optimizer '" + s.method + "'");
}

double gradient_norm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

}  // namespace vcl
