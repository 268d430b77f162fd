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
#include "vcl/core/rng.hpp"

#include <string>
#include <vector>

namespace vcl {

/// Inverted dropout applied during training; rate 0 disables it.
struct DropoutContext {
  double rate = 0.0;
  Rng* rng = nullptr;
};

/// Pre-norm transformer encoder layer: multi-head self-attention and a GELU
/// feed-forward network, each behind a layer norm and a residual connection.
///
/// Parameters per layer: 4 (D^2 + D) for the fused QKV and output
/// projections, D * F + F + F * D + D for the feed-forward network and 4 D for
/// the two layer norms.
struct TransformerBlock {
  Parameter ln1_gamma, ln1_beta;
  Parameter qkv_weight, qkv_bias;  // D x 3D, 1 x 3D
  Parameter out_weight, out_bias;  // D x D, 1 x D
  Parameter ln2_gamma, ln2_beta;
  Parameter fc1_weight, fc1_bias;  // D x F, 1 x F
  Parameter fc2_weight, fc2_bias;  // F x D, 1 x D
  int heads = 1;

  /// Truncated-normal weights (std `init_std`), zero biases, unit LN gains.
  static TransformerBlock create(const std::string& prefix, int width, int heads, int ffn_width,
                                 Rng& rng, double init_std = 0.02);

  int width() const { return static_cast<int>(qkv_weight.value.rows()); }
  int ffn_width() const { return static_cast<int>(fc1_weight.value.cols()); }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Trainable forward pass; gradients flow into the block's parameters.
  ag::Var forward(ag::Tape& tape, ag::Var x, const DropoutContext& dropout = {});
  /// Frozen forward pass; only the input may carry a gradient.
  ag::Var forward_frozen(ag::Tape& tape, ag::Var x) const;
};

}  // namespace vcl
