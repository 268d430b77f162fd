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

#pragma once

#include "vcl/core/autograd.hpp"
#include "vcl/core/config.hpp"

#include <map>
#include <memory>
#include <span>

namespace vcl {

/// Applies accumulated gradients; state is keyed by parameter address.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::span<Parameter* const> params) = 0;
  std::int64_t steps() const { return steps_; }

 protected:
  std::int64_t steps_ = 0;
};

/// Plain SGD with optional heavy-ball momentum.
class Sgd final : public Optimizer {
 public:
  explicit Sgd(double lr, double momentum = 0.0) : lr_(lr), momentum_(momentum) {}
  void step(std::span<Parameter* const> params) override;

 private:
  double lr_, momentum_;
  std::map<const Parameter*, Matrix> velocity_;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::span<Parameter* const> params) override;

 private:
  double lr_, beta1_, beta2_, eps_;
  std::map<const Parameter*, std::pair<Matrix, Matrix>> moments_;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSettings& settings);

/// Euclidean norm over all gradients.
double gradient_norm(std::span<Parameter* const> params);

}  // namespace vcl
