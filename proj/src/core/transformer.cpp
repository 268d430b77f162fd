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

#include "vcl/core/transformer.hpp"

#include "vcl/core/errors.hpp"

#include <cmath>

namespace vcl {

namespace {

ag::Var apply_dropout(ag::Tape& tape, ag::Var x, const DropoutContext& dropout) {
  if (dropout.rate <= 0.0 || dropout.rng == nullptr) return x;
  const Matrix& v = tape.value(x);
  const double keep = 1.0 - dropout.rate;
  Matrix mask(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = uniform01(*dropout.rng) < keep ? 1.0 / keep : 0.0;
  }
  return tape.mul(x, tape.constant(std::move(mask)));
}

template <typename Block, typename Leaf>
ag::Var block_forward(Block& b, ag::Tape& tape, ag::Var x, Leaf leaf,
                      const DropoutContext& dropout) {
  const int d = b.width();
  if (tape.value(x).cols() != d) {
    throw ContractError("transformer block: input width " +
                        std::to_string(tape.value(x).cols()) + " != " + std::to_string(d));
  }
  const int hd = d / b.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  ag::Var h = tape.layer_norm(x, leaf(b.ln1_gamma), leaf(b.ln1_beta));
  ag::Var qkv = tape.add_row(tape.matmul(h, leaf(b.qkv_weight)), leaf(b.qkv_bias));
  std::vector<ag::Var> heads;
  heads.reserve(b.heads);
  for (int i = 0; i < b.heads; ++i) {
    ag::Var q = tape.slice_cols(qkv, i * hd, hd);
    ag::Var k = tape.slice_cols(qkv, d + i * hd, hd);
    ag::Var v = tape.slice_cols(qkv, 2 * d + i * hd, hd);
    ag::Var att = tape.softmax_rows(tape.scale(tape.matmul_bt(q, k), scale));
    heads.push_back(tape.matmul(att, v));
  }
  ag::Var merged = b.heads == 1 ? heads.front() : tape.concat_cols(heads);
  ag::Var attn = tape.add_row(tape.matmul(merged, leaf(b.out_weight)), leaf(b.out_bias));
  x = tape.add(x, apply_dropout(tape, attn, dropout));

  ag::Var h2 = tape.layer_norm(x, leaf(b.ln2_gamma), leaf(b.ln2_beta));
  ag::Var f = tape.gelu(tape.add_row(tape.matmul(h2, leaf(b.fc1_weight)), leaf(b.fc1_bias)));
  ag::Var f2 = tape.add_row(tape.matmul(f, leaf(b.fc2_weight)), leaf(b.fc2_bias));
  return tape.add(x, apply_dropout(tape, f2, dropout));
}

}  // namespace

TransformerBlock TransformerBlock::create(const std::string& prefix, int width, int heads,
                                          int ffn_width, Rng& rng, double init_std) {
  if (width <= 0 || heads <= 0 || width % heads != 0 || ffn_width <= 0) {
    throw ConfigError("transformer block: width must be positive and divisible by heads");
  }
  TransformerBlock b;
  b.heads = heads;
  auto ones = [](int n) { return Matrix::Ones(1, n); };
  auto zeros = [](int r, int c) { return Matrix::Zero(r, c); };
  b.ln1_gamma = Parameter(prefix + ".ln1.gamma", ones(width));
  b.ln1_beta = Parameter(prefix + ".ln1.beta", zeros(1, width));
  b.qkv_weight =
      Parameter(prefix + ".attn.qkv.weight", truncated_normal_matrix(rng, width, 3 * width, init_std));
  b.qkv_bias = Parameter(prefix + ".attn.qkv.bias", zeros(1, 3 * width));
  b.out_weight =
      Parameter(prefix + ".attn.out.weight", truncated_normal_matrix(rng, width, width, init_std));
  b.out_bias = Parameter(prefix + ".attn.out.bias", zeros(1, width));
  b.ln2_gamma = Parameter(prefix + ".ln2.gamma", ones(width));
  b.ln2_beta = Parameter(prefix + ".ln2.beta", zeros(1, width));
  b.fc1_weight =
      Parameter(prefix + ".ffn.fc1.weight", truncated_normal_matrix(rng, width, ffn_width, init_std));
  b.fc1_bias = Parameter(prefix + ".ffn.fc1.bias", zeros(1, ffn_width));
  b.fc2_weight =
      Parameter(prefix + ".ffn.fc2.weight", truncated_normal_matrix(rng, ffn_width, width, init_std));
  b.fc2_bias = Parameter(prefix + ".ffn.fc2.bias", zeros(1, width));
  return b;
}

std::vector<Parameter*> TransformerBlock::parameters() {
  return {&ln1_gamma,  &ln1_beta, &qkv_weight, &qkv_bias, &out_weight, &out_bias,
          &ln2_gamma,  &ln2_beta, &fc1_weight, &fc1_bias, &fc2_weight, &fc2_bias};
}

std::vector<const Parameter*> TransformerBlock::parameters() const {
  return {&ln1_gamma,  &ln1_beta, &qkv_weight, &qkv_bias, &out_weight, &out_bias,
          &ln2_gamma,  &ln2_beta, &fc1_weight, &fc1_bias, &fc2_weight, &fc2_bias};
}

ag::Var TransformerBlock::forward(ag::Tape& tape, ag::Var x, const DropoutContext& dropout) {
  return block_forward(*this, tape, x, [&tape](Parameter& p) { return tape.parameter(p); },
                       dropout);
}

ag::Var TransformerBlock::forward_frozen(ag::Tape& tape, ag::Var x) const {
  return block_forward(*this, tape, x, [&tape](const Parameter& p) { return tape.frozen(p); },
                       DropoutContext{});
}

}  // namespace vcl
