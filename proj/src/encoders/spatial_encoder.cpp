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

#include "vcl/encoders/spatial_encoder.hpp"

#include "vcl/core/errors.hpp"

namespace vcl {

nlohmann::json EncoderProfile::to_json() const {
  return {{"name", name},
          {"frame_height", frame_height},
          {"frame_width", frame_width},
          {"channels", channels},
          {"patch_size", patch_size},
          {"tokens", tokens},
          {"input_width", input_width},
          {"model_width", model_width},
          {"preprocessing", preprocessing}};
}

void FrozenSpatialEncoder::check_frame(const Frame& frame) const {
  const auto& p = profile();
  if (frame.height != p.frame_height || frame.width != p.frame_width ||
      frame.channels != p.channels ||
      frame.pixels.size() != std::size_t(frame.height) * frame.width * frame.channels) {
    throw InputError("frame shape " + std::to_string(frame.height) + "x" +
                     std::to_string(frame.width) + "x" + std::to_string(frame.channels) +
                     " does not match encoder profile '" + p.name + "' (" +
                     std::to_string(p.frame_height) + "x" + std::to_string(p.frame_width) + "x" +
                     std::to_string(p.channels) + ")");
  }
}

Matrix FrozenSpatialEncoder::run_attention_stack(const Matrix& tokens) const {
  ag::Tape tape;
  return tape.value(attention_stack(tape, tape.constant_ref(tokens)));
}

RowVector FrozenSpatialEncoder::class_feature(const Matrix& tokens) const {
  return run_attention_stack(tokens).row(0);
}

Tensor3 FrozenSpatialEncoder::encode_patches(const VideoSample& sample) const {
  sample.validate();
  const auto& p = profile();
  if (sample.is_cached()) {
    for (const auto& t : sample.cached_tokens) {
      if (t.rows() != p.tokens || t.cols() != p.input_width) {
        throw InputError("cached tokens " + shape_string(t) + " do not match encoder profile '" +
                         p.name + "'");
      }
    }
    return sample.cached_tokens;
  }
  Tensor3 out;
  out.reserve(sample.frames.size());
  for (const auto& f : sample.frames) out.push_back(input_layer(f));
  return out;
}

Matrix FrozenSpatialEncoder::frame_features_from_tokens(const Tensor3& tokens) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), profile().model_width);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    out.row(Eigen::Index(t)) = class_feature(tokens[t]);
  }
  return out;
}

Matrix FrozenSpatialEncoder::encode_frame_features(const VideoSample& sample) const {
  return frame_features_from_tokens(encode_patches(sample));
}

}  // namespace vcl
