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

#include "vcl/method/forward.hpp"

#include "vcl/core/errors.hpp"

namespace vcl {

EncodedSample encode_sample(const VideoSample& sample, const FrozenSpatialEncoder& f_sp) {
  EncodedSample out;
  out.tokens = f_sp.encode_patches(sample);
  out.frame_features = f_sp.frame_features_from_tokens(out.tokens);
  out.label = sample.label;
  out.source_id = sample.source_id;
  return out;
}

VideoSample to_video_sample(const EncodedSample& sample) {
  VideoSample v;
  v.cached_tokens = sample.tokens;
  v.label = sample.label;
  v.source_id = sample.source_id;
  return v;
}

ForwardResult forward_unprompted(const EncodedSample& sample, const TemporalEncoder& f_tp,
                                 const TextClassBank& bank, double temperature) {
  ForwardResult r;
  r.embedding = f_tp.temporal_forward_class(sample.frame_features);
  const MclPrediction p = mcl_classify(r.embedding, bank, temperature);
  r.class_id = p.class_id;
  r.logits = p.logits;
  return r;
}

ForwardResult forward_unprompted(const VideoSample& sample, const FrozenSpatialEncoder& f_sp,
                                 const TemporalEncoder& f_tp, const TextClassBank& bank,
                                 double temperature) {
  ForwardResult r;
  r.embedding = f_tp.temporal_forward_class(f_sp.encode_frame_features(sample));
  const MclPrediction p = mcl_classify(r.embedding, bank, temperature);
  r.class_id = p.class_id;
  r.logits = p.logits;
  return r;
}

std::size_t select_prompts(const EncodedSample& sample, const PromptPool& pool,
                           const TemporalEncoder& f_tp) {
  if (pool.empty()) throw SelectionError("prompt selection: empty pool");
  return select_prompt_index(f_tp.temporal_forward_class(sample.frame_features), pool);
}

const PromptSet& select_prompts(const VideoSample& sample, const PromptPool& pool,
                                const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp) {
  if (pool.empty()) throw SelectionError("prompt selection: empty pool");
  const RowVector q = f_tp.temporal_forward_class(f_sp.encode_frame_features(sample));
  return pool.at(select_prompt_index(q, pool));
}

ag::Var prompted_frame_features(ag::Tape& tape, const Tensor3& tokens, ag::Var spatial_prompts,
                                const FrozenSpatialEncoder& f_sp) {
  const Matrix& p = tape.value(spatial_prompts);
  const Eigen::Index n = p.rows();
  if (n == 0) throw ContractError("prompted pass: empty spatial prompt tensor");
  if (p.cols() != f_sp.profile().input_width) {
    throw ContractError("prompted pass: spatial prompt width " + std::to_string(p.cols()) +
                        " does not match encoder input width " +
                        std::to_string(f_sp.profile().input_width));
  }
  std::vector<ag::Var> frames;
  frames.reserve(tokens.size());
  for (const Matrix& t : tokens) {
    const ag::Var parts[] = {spatial_prompts, tape.constant_ref(t)};
    const ag::Var out = f_sp.attention_stack(tape, tape.concat_rows(parts));
    frames.push_back(tape.mean_rows(tape.slice_rows(out, 0, n)));
  }
  return tape.concat_rows(frames);
}

namespace {

ForwardResult prompted_pass(const Tensor3& tokens, const PromptSet& prompts,
                            const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                            const TextClassBank& bank, double temperature) {
  if (prompts.temporal.value.cols() != f_tp.width()) {
    throw ContractError("prompted pass: temporal prompt width mismatch");
  }
  ag::Tape tape;
  const ag::Var frames =
      prompted_frame_features(tape, tokens, tape.frozen(prompts.spatial), f_sp);
  const ag::Var v = f_tp.forward_prompted(tape, tape.frozen(prompts.temporal), frames);
  ForwardResult r;
  r.embedding = tape.value(v).row(0);
  const MclPrediction p = mcl_classify(r.embedding, bank, temperature);
  r.class_id = p.class_id;
  r.logits = p.logits;
  return r;
}

}  // namespace

ForwardResult forward_prompted(const EncodedSample& sample, const PromptSet& prompts,
                               const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                               const TextClassBank& bank, double temperature) {
  return prompted_pass(sample.tokens, prompts, f_sp, f_tp, bank, temperature);
}

ForwardResult forward_prompted(const VideoSample& sample, const PromptSet& prompts,
                               const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                               const TextClassBank& bank, double temperature) {
  return prompted_pass(f_sp.encode_patches(sample), prompts, f_sp, f_tp, bank, temperature);
}

ForwardResult forward_with_selection(const EncodedSample& sample, const PromptPool& pool,
                                     const FrozenSpatialEncoder& f_sp, const TemporalEncoder& f_tp,
                                     const TextClassBank& bank, double temperature) {
  const std::size_t idx = select_prompts(sample, pool, f_tp);
  ForwardResult r = forward_prompted(sample, pool.at(idx), f_sp, f_tp, bank, temperature);
  r.prompt_index = idx;
  return r;
}

}  // namespace vcl
