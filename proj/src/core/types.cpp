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

#include "vcl/core/types.hpp"

#include "vcl/core/errors.hpp"

#include <array>
#include <utility>

namespace vcl {

void Dims::validate() const {
  if (frames <= 0 || tokens <= 0 || input_width <= 0 || model_width <= 0) {
    throw ConfigError("dims: frames, tokens and widths must be positive");
  }
  if (prompts_per_task < 0) throw ConfigError("dims: prompts_per_task must be >= 0");
  if (prompts_per_task > 0 && (spatial_prompt_len <= 0 || temporal_prompt_len <= 0)) {
    throw ConfigError("dims: prompt lengths must be positive");
  }
}

void VideoSample::validate() const {
  const bool has_frames = !frames.empty();
  const bool has_tokens = !cached_tokens.empty();
  if (has_frames == has_tokens) {
    throw InputError("video sample '" + source_id +
                     "' must hold exactly one of raw frames or cached tokens");
  }
}

namespace {

constexpr std::array<std::pair<Variant, const char*>, 7> kVariantNames{{
    {Variant::zero_shot, "zero_shot"},
    {Variant::spatial_prompting_linear, "spatial_prompting_linear"},
    {Variant::memory_linear, "memory_linear"},
    {Variant::memory_mcl, "memory_mcl"},
    {Variant::temporal_mcl, "temporal_mcl"},
    {Variant::pivot, "pivot"},
    {Variant::pivot_no_prompts, "pivot_no_prompts"},
}};

}  // namespace

std::string to_string(Variant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (const auto& [variant, n] : kVariantNames) {
    if (name == n) return variant;
  }
  throw ConfigError("unknown variant '" + name + "'");
}

bool uses_temporal_encoder(Variant v) {
  return v == Variant::temporal_mcl || v == Variant::pivot || v == Variant::pivot_no_prompts;
}

bool uses_task_prompts(Variant v) { return v == Variant::pivot; }

bool uses_shared_prompt_pool(Variant v) {
  return v == Variant::spatial_prompting_linear || v == Variant::memory_linear ||
         v == Variant::memory_mcl;
}

bool uses_replay(Variant v) {
  return v != Variant::zero_shot && v != Variant::spatial_prompting_linear;
}

bool uses_linear_head(Variant v) {
  return v == Variant::spatial_prompting_linear || v == Variant::memory_linear;
}

}  // namespace vcl
