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

#include "vcl/encoders/spatial_encoder.hpp"
#include "vcl/method/mcl.hpp"
#include "vcl/method/prompts.hpp"
#include "vcl/temporal/temporal_encoder.hpp"

namespace vcl {

/// A video after the frozen input layer: its tokens (T x L x D_in) and the
/// frozen encoder's per-frame class features (T x D_m).
struct EncodedSample {
  Tensor3 tokens;
  Matrix frame_features;
  ClassId label = -1;
  std::string source_id;
};

EncodedSample encode_sample(const VideoSample& sample, const FrozenSpatialEncoder& f_sp);
/// The cached-token form of an encoded sample.
VideoSample to_video_sample(const EncodedSample& sample);

struct ForwardResult {
  ClassId class_id = -1;
  RowVector embedding;  // v_tp
  RowVector logits;
  std::size_t prompt_index = 0;  // selected pool entry, prompted path only
};

/// Temporal class-token embedding of the frozen per-frame features.
ForwardResult forward_unprompted(const EncodedSample& sample, const TemporalEncoder& f_tp,
                                 const TextClassBank& bank, double temperature);
ForwardResult forward_unprompted(const VideoSample& sample, const FrozenSpatialEncoder& f_sp,
                                 const TemporalEncoder& f_tp, const TextClassBank& bank,
                                 double temperature);

/// Query (unprompted class-token embedding) followed by the nearest-key scan.
std::size_t select_prompts(const EncodedSample& sample, const PromptPool& pool,
                           const TemporalEncoder& f_tp);
const PromptSet& select_prompts(const VideoSample& sample, const PromptPool& pool,
                                const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp);

/// Per frame: prepend the spatial prompts, run the attention stack and average
/// the outputs at the prompt positions. Result is T x D_m on the tape.
ag::Var prompted_frame_features(ag::Tape& tape, const Tensor3& tokens, ag::Var spatial_prompts,
                                const FrozenSpatialEncoder& f_sp);

/// Full prompted pass with a given prompt set.
ForwardResult forward_prompted(const EncodedSample& sample, const PromptSet& prompts,
                               const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                               const TextClassBank& bank, double temperature);
ForwardResult forward_prompted(const VideoSample& sample, const PromptSet& prompts,
                               const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                               const TextClassBank& bank, double temperature);

/// Selection followed by the prompted pass.
ForwardResult forward_with_selection(const EncodedSample& sample, const PromptPool& pool,
                                     const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                                     const TextClassBank& bank, double temperature);

}  // namespace vcl
