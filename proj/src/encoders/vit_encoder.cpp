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

#include "vcl/encoders/vit_encoder.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"

#include <cmath>

namespace vcl {

VitOptions VitOptions::b32(int depth, std::uint64_t seed) {
  VitOptions o;
  o.depth = depth;
  o.seed = seed;
  return o;
}

VitSpatialEncoder::VitSpatialEncoder(const VitOptions& options) : options_(options) {
  if (options.image_size % options.patch_size != 0) {
    throw ConfigError("vit: image size must be a multiple of the patch size");
  }
  const int grid = options.image_size / options.patch_size;
  const int tokens = grid * grid + 1;
  const int patch_dim = options.patch_size * options.patch_size * options.channels;
  const int d = options.width;

  profile_.name = "vit-p" + std::to_string(options.patch_size) + "-w" + std::to_string(d) + "-d" +
                  std::to_string(options.depth);
  profile_.frame_height = options.image_size;
  profile_.frame_width = options.image_size;
  profile_.channels = options.channels;
  profile_.patch_size = options.patch_size;
  profile_.tokens = tokens;
  profile_.input_width = d;
  profile_.model_width = options.output_width;
  profile_.preprocessing = "center-crop " + std::to_string(options.image_size) +
                           ", per-channel mean/std normalisation (0.48145466, 0.4578275, "
                           "0.40821073) / (0.26862954, 0.26130258, 0.27577711)";

  Rng rng(derive_seed(options.seed, {hash_string("vit")}));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  patch_weight_ = Parameter("conv1.weight", normal_matrix(rng, patch_dim, d, 1.0 / std::sqrt(double(patch_dim))));
  class_embedding_ = Parameter("class_embedding", normal_matrix(rng, 1, d, scale));
  positional_ = Parameter("positional_embedding", normal_matrix(rng, tokens, d, scale));
  ln_pre_gamma_ = Parameter("ln_pre.gamma", Matrix::Ones(1, d));
  ln_pre_beta_ = Parameter("ln_pre.beta", Matrix::Zero(1, d));
  for (int i = 0; i < options.depth; ++i) {
    blocks_.push_back(TransformerBlock::create("blocks." + std::to_string(i), d, options.heads,
                                               options.mlp_width, rng, scale));
  }
  ln_post_gamma_ = Parameter("ln_post.gamma", Matrix::Ones(1, d));
  ln_post_beta_ = Parameter("ln_post.beta", Matrix::Zero(1, d));
  projection_ = Parameter("proj", normal_matrix(rng, d, options.output_width, scale));
  finalize();
}

VitSpatialEncoder::VitSpatialEncoder(const VitOptions& options, const TensorArchive& weights)
    : VitSpatialEncoder(options) {
  load_parameters(weights, mutable_parameters());
  finalize();
}

void VitSpatialEncoder::finalize() {
  for (Parameter* p : mutable_parameters()) p->grad.resize(0, 0);
  const auto params = parameters();
  digest_ = digest_parameters(params);
}

std::vector<const Parameter*> VitSpatialEncoder::parameters() const {
  std::vector<const Parameter*> out = {&patch_weight_, &class_embedding_, &positional_,
                                       &ln_pre_gamma_, &ln_pre_beta_};
  for (const auto& b : blocks_) {
    for (const Parameter* p : b.parameters()) out.push_back(p);
  }
  out.push_back(&ln_post_gamma_);
  out.push_back(&ln_post_beta_);
  out.push_back(&projection_);
  return out;
}

std::vector<Parameter*> VitSpatialEncoder::mutable_parameters() {
  std::vector<Parameter*> out = {&patch_weight_, &class_embedding_, &positional_, &ln_pre_gamma_,
                                 &ln_pre_beta_};
  for (auto& b : blocks_) {
    for (Parameter* p : b.parameters()) out.push_back(p);
  }
  out.push_back(&ln_post_gamma_);
  out.push_back(&ln_post_beta_);
  out.push_back(&projection_);
  return out;
}

Matrix VitSpatialEncoder::input_layer(const Frame& frame) const {
  check_frame(frame);
  const int p = options_.patch_size;
  const int grid = options_.image_size / p;
  const int patch_dim = p * p * options_.channels;
  Matrix patches(grid * grid, patch_dim);
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      const int row = gy * grid + gx;
      int col = 0;
      for (int y = 0; y < p; ++y)
        for (int x = 0; x < p; ++x)
          for (int c = 0; c < options_.channels; ++c)
            patches(row, col++) = frame.at(gy * p + y, gx * p + x, c);
    }
  }
  Matrix tokens(profile_.tokens, options_.width);
  tokens.row(0) = class_embedding_.value.row(0);
  tokens.bottomRows(grid * grid) = patches * patch_weight_.value;
  tokens += positional_.value;
  round_to_float32(tokens);
  return tokens;
}

ag::Var VitSpatialEncoder::attention_stack(ag::Tape& tape, ag::Var tokens) const {
  if (tape.value(tokens).cols() != options_.width) {
    throw ContractError("vit: token width mismatch");
  }
  ag::Var x = tape.layer_norm(tokens, tape.frozen(ln_pre_gamma_), tape.frozen(ln_pre_beta_));
  for (const auto& b : blocks_) x = b.forward_frozen(tape, x);
  x = tape.layer_norm(x, tape.frozen(ln_post_gamma_), tape.frozen(ln_post_beta_));
  return tape.matmul(x, tape.frozen(projection_));
}

}  // namespace vcl
