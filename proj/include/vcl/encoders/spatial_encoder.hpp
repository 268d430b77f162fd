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
#include "vcl/core/types.hpp"

#include <json.hpp>

#include <string>

namespace vcl {

/// Shape contract of a frozen image encoder.
struct EncoderProfile {
  std::string name;
  int frame_height = 0;
  int frame_width = 0;
  int channels = 0;
  int patch_size = 1;
  int tokens = 0;       // L: patches plus the class token
  int input_width = 0;  // D_in
  int model_width = 0;  // D_m
  std::string preprocessing;

  int patches() const { return tokens - 1; }
  nlohmann::json to_json() const;
};

/// A frozen image encoder split at the point where spatial prompts are
/// injected: an input layer mapping a frame to L x D_in tokens (class token
/// first) and an attention stack mapping any S x D_in token sequence to
/// S x D_m features.
///
/// Implementations are immutable after construction. Input-layer outputs are
/// rounded to float32 so the cached-token form is exact.
class FrozenSpatialEncoder {
 public:
  virtual ~FrozenSpatialEncoder() = default;

  virtual const EncoderProfile& profile() const = 0;
  /// Throws InputError when the frame does not match the profile.
  virtual Matrix input_layer(const Frame& frame) const = 0;
  /// Runs the attention stack on a tape. Only `tokens` may carry gradient.
  virtual ag::Var attention_stack(ag::Tape& tape, ag::Var tokens) const = 0;
  /// SHA-256 over the encoder's parameters.
  virtual const std::string& digest() const = 0;

  Matrix run_attention_stack(const Matrix& tokens) const;
  /// The encoder's own pooled output for one frame's unprompted tokens: the
  /// attention-stack output at the class-token position.
  RowVector class_feature(const Matrix& tokens) const;

  /// T x L x D_in tokens. Cached samples are returned verbatim.
  Tensor3 encode_patches(const VideoSample& sample) const;
  /// T x D_m per-frame class features, not normalised.
  Matrix encode_frame_features(const VideoSample& sample) const;
  /// Frame features from already encoded tokens.
  Matrix frame_features_from_tokens(const Tensor3& tokens) const;

 protected:
  void check_frame(const Frame& frame) const;
};

}  // namespace vcl
