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

#include "vcl/core/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>

namespace vcl {

struct OptimizerSettings {
  std::string method = "sgd";  // sgd | adam
  double learning_rate = 0.01;
  double momentum = 0.0;
  int batch_size = 50;
  int epochs = 40;  // per training stage
};

/// Generator settings for the seeded desk-scale benchmark.
struct SyntheticSettings {
  int num_classes = 20;
  int train_per_class = 50;
  int eval_per_class = 10;
  int raw_frames = 8;          // frames per generated video before segment sampling
  double sigma_fraction = 0.5;  // noise scale as a fraction of the separability bound
  double sigma = -1.0;          // absolute override when >= 0
  int foreground_patches = 3;
  double marker_strength = 1.0;
  double attention_gain = 4.0;
  std::uint64_t encoder_seed = 1234;
};

struct ExperimentConfig {
  std::string dataset = "synthetic";  // synthetic | cache
  std::string cache_dir;
  int n_tasks = 10;
  Dims dims;
  int memory_budget = 2000;
  OptimizerSettings optimizer;
  Variant variant = Variant::pivot;
  std::uint64_t seed = 0;
  double temperature = 0.01;
  std::string text_template = "a video of a person {label}.";

  int temporal_layers = 3;
  int temporal_heads = 2;
  int ffn_width = 0;  // 0 selects 4 * D_m
  bool positional_embeddings = true;
  double dropout = 0.0;

  bool stage3 = true;                // replay fine-tuning of the temporal encoder
  bool stage3_prompted_term = true;  // include the prompted loss term in replay

  int l2p_pool_size = 10;
  int l2p_prompt_length = 5;
  int l2p_top_k = 5;
  double l2p_learning_rate = 0.03;
  double l2p_key_weight = 0.1;

  SyntheticSettings synthetic;

  int effective_ffn_width() const { return ffn_width > 0 ? ffn_width : 4 * dims.model_width; }

  /// Full-scale defaults (ViT-B/32 widths, SGD 0.01, batch 50, 40 epochs).
  static ExperimentConfig full_scale() { return ExperimentConfig{}; }
  /// The seeded 20-class, 5-task benchmark used for end-to-end acceptance.
  static ExperimentConfig synthetic_benchmark();

  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  /// Applies one flat key. Throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Flat key/value view, the same keys accepted by set().
  std::map<std::string, std::string> to_map() const;
  nlohmann::json to_json() const;
};

/// Parses a `key = value` document (blank lines and `#` comments ignored)
/// on top of `base`. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text,
                              ExperimentConfig base = ExperimentConfig::synthetic_benchmark());
ExperimentConfig load_config(const std::string& path,
                             ExperimentConfig base = ExperimentConfig::synthetic_benchmark());
std::string format_config(const ExperimentConfig& cfg);

}  // namespace vcl
