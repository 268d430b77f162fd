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

#include "vcl/core/config.hpp"
#include "vcl/method/forward.hpp"

#include <cstdint>
#include <vector>

namespace vcl {

/// Shared spatial prompt pool with learnable keys: the query (mean frozen
/// frame feature) picks the top-k keys by cosine similarity and the chosen
/// prompts are concatenated in front of every frame's tokens.
struct SharedPromptPool {
  Parameter keys;                  // pool_size x D_m
  std::vector<Parameter> prompts;  // pool_size entries of length x D_in
  int top_k = 5;

  static SharedPromptPool create(int pool_size, int length, int top_k, int input_width,
                                 int model_width, std::uint64_t seed);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Indices of the top-k keys for a query, highest similarity first; ties
  /// keep the lower index.
  std::vector<int> select(const RowVector& query) const;
};

/// Affine classifier over D_m features whose rows grow as classes arrive.
struct LinearHead {
  Parameter weight;  // M x D_m
  Parameter bias;    // 1 x M
  std::vector<ClassId> class_ids;

  explicit LinearHead(int width = 0);
  /// Appends rows for new classes; existing rows are untouched.
  void grow(std::span<const ClassId> ids, Rng& rng);
  int row_of(ClassId c) const;
  std::vector<Parameter*> parameters() { return {&weight, &bias}; }
  std::vector<const Parameter*> parameters() const { return {&weight, &bias}; }
};

/// The spatial-prompting baselines: shared pool plus either a linear head or
/// the contrastive text classifier.
class SharedPromptModel {
 public:
  SharedPromptModel(const ExperimentConfig& cfg, const FrozenSpatialEncoder& f_sp);

  SharedPromptPool& pool() { return pool_; }
  const SharedPromptPool& pool() const { return pool_; }
  LinearHead& head() { return head_; }
  const LinearHead& head() const { return head_; }
  bool linear() const { return linear_; }

  /// Video embedding (mean over frames of the pooled prompt outputs) on the
  /// tape, plus the key-pull term for the selected keys.
  struct Pass {
    ag::Var embedding;
    ag::Var key_loss;
  };
  Pass forward(ag::Tape& tape, const EncodedSample& sample, bool trainable);

  /// Classification loss on the tape for one sample.
  ag::Var loss(ag::Tape& tape, const EncodedSample& sample, const TextClassBank& bank);
  ClassId predict(const EncodedSample& sample, const TextClassBank& bank) const;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::string digest() const;

 private:
  Pass forward_impl(ag::Tape& tape, const EncodedSample& sample, bool trainable) const;

  const FrozenSpatialEncoder* f_sp_;
  SharedPromptPool pool_;
  LinearHead head_;
  bool linear_;
  double temperature_;
  double key_weight_;
};

/// Zero-shot video embedding: mean of the frozen per-frame features.
RowVector mean_frame_feature(const EncodedSample& sample);

}  // namespace vcl
