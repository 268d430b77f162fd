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

#include "vcl/core/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vcl {

using ClassId = int;

/// Dimensional contract shared by encoders, prompts and the temporal model.
struct Dims {
  int frames = 8;            // T
  int tokens = 50;           // L, patch tokens per frame including the class token
  int input_width = 768;     // D_in, width of the frozen input layer
  int model_width = 512;     // D_m, shared modality width
  int prompts_per_task = 1;  // N_p
  int spatial_prompt_len = 3;
  int temporal_prompt_len = 3;

  /// ViT-B/32 shaped profile: 224/32 = 7, 7 * 7 + 1 = 50 tokens.
  static Dims vit_b32() { return Dims{}; }

  int spatial_prompt_rows() const { return prompts_per_task * spatial_prompt_len; }
  int temporal_prompt_rows() const { return prompts_per_task * temporal_prompt_len; }

  /// Throws ConfigError unless every width/length is positive. N_p = 0 is
  /// allowed and disables prompting.
  void validate() const;
};

/// One raw frame, H x W x C float32 pixels in row-major HWC order.
struct Frame {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> pixels;

  Frame() = default;
  Frame(int h, int w, int c) : height(h), width(w), channels(c), pixels(std::size_t(h) * w * c) {}

  float& at(int y, int x, int ch) { return pixels[(std::size_t(y) * width + x) * channels + ch]; }
  float at(int y, int x, int ch) const {
    return pixels[(std::size_t(y) * width + x) * channels + ch];
  }
};

/// The atomic training/evaluation unit. Holds either raw frames or the frozen
/// input layer's output for each frame, never both.
struct VideoSample {
  std::vector<Frame> frames;
  Tensor3 cached_tokens;  // frames x L x D_in
  ClassId label = -1;
  std::string source_id;

  bool is_cached() const { return !cached_tokens.empty(); }
  std::size_t frame_count() const {
    return is_cached() ? cached_tokens.size() : frames.size();
  }
  /// Throws InputError when both or neither representation is populated.
  void validate() const;
};

struct TaskSpec {
  int task_index = 1;  // 1-based
  std::vector<ClassId> class_ids;
  std::vector<std::string> class_names;
};

enum class Variant {
  zero_shot,
  spatial_prompting_linear,
  memory_linear,
  memory_mcl,
  temporal_mcl,
  pivot,
  pivot_no_prompts,
};

std::string to_string(Variant v);
/// Throws ConfigError for unknown names.
Variant parse_variant(const std::string& name);

/// Variants whose video embedding comes from the trainable temporal encoder.
bool uses_temporal_encoder(Variant v);
/// Variants that route through task-specific prompt sets.
bool uses_task_prompts(Variant v);
/// Variants that use the shared spatial prompt pool and learned key matching.
bool uses_shared_prompt_pool(Variant v);
bool uses_replay(Variant v);
bool uses_linear_head(Variant v);

}  // namespace vcl
