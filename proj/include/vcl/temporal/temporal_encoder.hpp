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

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace vcl {

struct TemporalOptions {
  int width = 512;  // D_m
  int layers = 3;
  int heads = 2;
  int ffn_width = 0;  // 0 selects 4 * width
  bool positional_embeddings = false;
  int max_positions = 0;  // rows of the positional table when enabled
  double init_std = 0.02;
  std::uint64_t seed = 0;

  int effective_ffn_width() const { return ffn_width > 0 ? ffn_width : 4 * width; }
  nlohmann::json to_json() const;
  static TemporalOptions from_json(const nlohmann::json& j);
};

/// The trainable temporal transformer: a stack of pre-norm encoder layers
/// over per-frame features, read out either at a learnable class token or by
/// averaging the outputs at temporal-prompt positions.
class TemporalEncoder {
 public:
  TemporalEncoder() = default;
  /// Seeded truncated-normal initialisation.
  explicit TemporalEncoder(const TemporalOptions& options);

  const TemporalOptions& options() const { return options_; }
  int width() const { return options_.width; }
  std::vector<TransformerBlock>& blocks() { return blocks_; }
  const std::vector<TransformerBlock>& blocks() const { return blocks_; }
  Parameter& class_token() { return class_token_; }
  const Parameter& class_token() const { return class_token_; }

  /// Runs the layers over a full sequence. With `trainable` the parameters
  /// receive gradients; otherwise they are constants on the tape.
  ag::Var encode(ag::Tape& tape, ag::Var sequence, bool trainable,
                 const DropoutContext& dropout = {});
  ag::Var encode(ag::Tape& tape, ag::Var sequence) const;

  /// Output at the class-token position of [class; frames].
  ag::Var forward_class(ag::Tape& tape, ag::Var frames, bool trainable,
                        const DropoutContext& dropout = {});
  ag::Var forward_class(ag::Tape& tape, ag::Var frames) const;
  /// Mean output over the prompt positions of [prompts; frames]. Throws
  /// ContractError for an empty prompt tensor.
  ag::Var forward_prompted(ag::Tape& tape, ag::Var prompts, ag::Var frames, bool trainable,
                           const DropoutContext& dropout = {});
  ag::Var forward_prompted(ag::Tape& tape, ag::Var prompts, ag::Var frames) const;

  RowVector temporal_forward_class(const Matrix& frames) const;
  RowVector temporal_forward_prompted(const Matrix& prompts, const Matrix& frames) const;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();
  std::int64_t count_parameters() const;
  std::string digest() const;

  void save(const std::string& path) const;
  /// Throws ContractError when the archive's shapes differ from `options`.
  static TemporalEncoder load(const std::string& path);

 private:
  template <typename Self>
  static ag::Var encode_impl(Self& self, ag::Tape& tape, ag::Var sequence, bool trainable,
                             const DropoutContext& dropout);
  void check_frames(const ag::Tape& tape, ag::Var frames) const;

  TemporalOptions options_;
  std::vector<TransformerBlock> blocks_;
  Parameter class_token_;
  Parameter positional_;
};

}  // namespace vcl
