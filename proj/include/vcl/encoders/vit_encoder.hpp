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

#include "vcl/core/serialize.hpp"
#include "vcl/core/transformer.hpp"
#include "vcl/encoders/spatial_encoder.hpp"

#include <vector>

namespace vcl {

struct VitOptions {
  int image_size = 224;
  int patch_size = 32;
  int channels = 3;
  int width = 768;        // D_in
  int output_width = 512;  // D_m
  int depth = 12;
  int heads = 12;
  int mlp_width = 3072;
  std::uint64_t seed = 0;

  /// ViT-B/32 widths; `depth` defaults to 12 but may be reduced for smoke runs.
  static VitOptions b32(int depth = 12, std::uint64_t seed = 0);
};

/// CLIP-style vision transformer: patch projection, class token, positional
/// embedding, pre-LN, pre-norm blocks, post-LN and an output projection.
/// The input layer ends after the positional embedding; prompts join the
/// sequence before the pre-LN.
class VitSpatialEncoder final : public FrozenSpatialEncoder {
 public:
  /// Seeded random weights.
  explicit VitSpatialEncoder(const VitOptions& options);
  /// Weights loaded from a tensor archive with the names produced by
  /// parameters(); throws ContractError on a shape mismatch.
  VitSpatialEncoder(const VitOptions& options, const TensorArchive& weights);

  const EncoderProfile& profile() const override { return profile_; }
  Matrix input_layer(const Frame& frame) const override;
  ag::Var attention_stack(ag::Tape& tape, ag::Var tokens) const override;
  const std::string& digest() const override { return digest_; }

  std::vector<const Parameter*> parameters() const;

 private:
  std::vector<Parameter*> mutable_parameters();
  void finalize();

  VitOptions options_;
  EncoderProfile profile_;
  Parameter patch_weight_;  // (p*p*C) x D_in
  Parameter class_embedding_;
  Parameter positional_;  // L x D_in
  Parameter ln_pre_gamma_, ln_pre_beta_;
  std::vector<TransformerBlock> blocks_;
  Parameter ln_post_gamma_, ln_post_beta_;
  Parameter projection_;  // D_in x D_m
  std::string digest_;
};

}  // namespace vcl
