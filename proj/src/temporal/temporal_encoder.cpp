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

#include "vcl/temporal/temporal_encoder.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"

#include <utility>

namespace vcl {

nlohmann::json TemporalOptions::to_json() const {
  return {{"width", width},
          {"layers", layers},
          {"heads", heads},
          {"ffn_width", effective_ffn_width()},
          {"positional_embeddings", positional_embeddings},
          {"max_positions", max_positions},
          {"init_std", init_std},
          {"seed", seed}};
}

TemporalOptions TemporalOptions::from_json(const nlohmann::json& j) {
  TemporalOptions o;
  o.width = j.at("width").get<int>();
  o.layers = j.at("layers").get<int>();
  o.heads = j.at("heads").get<int>();
  o.ffn_width = j.at("ffn_width").get<int>();
  o.positional_embeddings = j.at("positional_embeddings").get<bool>();
  o.max_positions = j.at("max_positions").get<int>();
  o.init_std = j.at("init_std").get<double>();
  o.seed = j.at("seed").get<std::uint64_t>();
  return o;
}

TemporalEncoder::TemporalEncoder(const TemporalOptions& options) : options_(options) {
  if (options.width <= 0 || options.layers < 0 || options.heads <= 0 ||
      options.width % options.heads != 0) {
    throw ConfigError("temporal encoder: width must be positive and divisible by heads");
  }
  if (options.positional_embeddings && options.max_positions <= 0) {
    throw ConfigError("temporal encoder: positional embeddings need max_positions > 0");
  }
  Rng rng(derive_seed(options.seed, {hash_string("temporal")}));
  for (int i = 0; i < options.layers; ++i) {
    blocks_.push_back(TransformerBlock::create("layers." + std::to_string(i), options.width,
                                               options.heads, options.effective_ffn_width(), rng,
                                               options.init_std));
  }
  class_token_ =
      Parameter("class_token", truncated_normal_matrix(rng, 1, options.width, options.init_std));
  if (options.positional_embeddings) {
    positional_ = Parameter("positional", truncated_normal_matrix(rng, options.max_positions,
                                                                  options.width, options.init_std));
  }
}

void TemporalEncoder::check_frames(const ag::Tape& tape, ag::Var frames) const {
  const Matrix& v = tape.value(frames);
  if (v.rows() < 1) throw InputError("temporal encoder: need at least one frame");
  if (v.cols() != options_.width) {
    throw InputError("temporal encoder: frame width " + std::to_string(v.cols()) +
                     " does not match model width " + std::to_string(options_.width));
  }
}

template <typename Self>
ag::Var TemporalEncoder::encode_impl(Self& self, ag::Tape& tape, ag::Var x, bool trainable,
                                     const DropoutContext& dropout) {
  const auto leaf = [&](auto& p) {
    if constexpr (std::is_const_v<Self>) {
      return tape.frozen(p);
    } else {
      return trainable ? tape.parameter(p) : tape.frozen(p);
    }
  };
  if (self.options_.positional_embeddings) {
    const Eigen::Index rows = tape.value(x).rows();
    if (rows > self.options_.max_positions) {
      throw ContractError("temporal encoder: sequence of " + std::to_string(rows) +
                          " exceeds the positional table (" +
                          std::to_string(self.options_.max_positions) + ")");
    }
    x = tape.add(x, tape.slice_rows(leaf(self.positional_), 0, rows));
  }
  for (auto& b : self.blocks_) {
    if constexpr (std::is_const_v<Self>) {
      x = b.forward_frozen(tape, x);
    } else {
      x = trainable ? b.forward(tape, x, dropout) : b.forward_frozen(tape, x);
    }
  }
  return x;
}

ag::Var TemporalEncoder::encode(ag::Tape& tape, ag::Var sequence, bool trainable,
                                const DropoutContext& dropout) {
  return encode_impl(*this, tape, sequence, trainable, dropout);
}

ag::Var TemporalEncoder::encode(ag::Tape& tape, ag::Var sequence) const {
  return encode_impl(*this, tape, sequence, false, {});
}

ag::Var TemporalEncoder::forward_class(ag::Tape& tape, ag::Var frames, bool trainable,
                                       const DropoutContext& dropout) {
  check_frames(tape, frames);
  const ag::Var cls = trainable ? tape.parameter(class_token_) : tape.frozen(class_token_);
  const ag::Var parts[] = {cls, frames};
  return tape.slice_rows(encode(tape, tape.concat_rows(parts), trainable, dropout), 0, 1);
}

ag::Var TemporalEncoder::forward_class(ag::Tape& tape, ag::Var frames) const {
  check_frames(tape, frames);
  const ag::Var parts[] = {tape.frozen(class_token_), frames};
  return tape.slice_rows(encode(tape, tape.concat_rows(parts)), 0, 1);
}

ag::Var TemporalEncoder::forward_prompted(ag::Tape& tape, ag::Var prompts, ag::Var frames,
                                          bool trainable, const DropoutContext& dropout) {
  check_frames(tape, frames);
  const Eigen::Index n = tape.value(prompts).rows();
  if (n == 0) throw ContractError("temporal encoder: empty prompt tensor; use the class path");
  if (tape.value(prompts).cols() != options_.width) {
    throw ContractError("temporal encoder: prompt width mismatch");
  }
  const ag::Var parts[] = {prompts, frames};
  const ag::Var out = encode(tape, tape.concat_rows(parts), trainable, dropout);
  return tape.mean_rows(tape.slice_rows(out, 0, n));
}

ag::Var TemporalEncoder::forward_prompted(ag::Tape& tape, ag::Var prompts, ag::Var frames) const {
  check_frames(tape, frames);
  const Eigen::Index n = tape.value(prompts).rows();
  if (n == 0) throw ContractError("temporal encoder: empty prompt tensor; use the class path");
  if (tape.value(prompts).cols() != options_.width) {
    throw ContractError("temporal encoder: prompt width mismatch");
  }
  const ag::Var parts[] = {prompts, frames};
  const ag::Var out = encode(tape, tape.concat_rows(parts));
  return tape.mean_rows(tape.slice_rows(out, 0, n));
}

RowVector TemporalEncoder::temporal_forward_class(const Matrix& frames) const {
  ag::Tape tape;
  return tape.value(forward_class(tape, tape.constant_ref(frames))).row(0);
}

RowVector TemporalEncoder::temporal_forward_prompted(const Matrix& prompts,
                                                     const Matrix& frames) const {
  ag::Tape tape;
  return tape.value(forward_prompted(tape, tape.constant_ref(prompts), tape.constant_ref(frames)))
      .row(0);
}

std::vector<Parameter*> TemporalEncoder::parameters() {
  std::vector<Parameter*> out;
  for (auto& b : blocks_) {
    for (Parameter* p : b.parameters()) out.push_back(p);
  }
  out.push_back(&class_token_);
  if (options_.positional_embeddings) out.push_back(&positional_);
  return out;
}

std::vector<const Parameter*> TemporalEncoder::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& b : blocks_) {
    for (const Parameter* p : b.parameters()) out.push_back(p);
  }
  out.push_back(&class_token_);
  if (options_.positional_embeddings) out.push_back(&positional_);
  return out;
}

void TemporalEncoder::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

std::int64_t TemporalEncoder::count_parameters() const {
  std::int64_t n = 0;
  for (const Parameter* p : parameters()) n += p->size();
  return n;
}

std::string TemporalEncoder::digest() const { return digest_parameters(parameters()); }

void TemporalEncoder::save(const std::string& path) const {
  TensorArchive a;
  a.header = {{"kind", "temporal_encoder"}, {"options", options_.to_json()}};
  for (const Parameter* p : parameters()) a.tensors.push_back({p->name, p->value});
  write_tensor_archive(path, a);
}

TemporalEncoder TemporalEncoder::load(const std::string& path) {
  const TensorArchive a = read_tensor_archive(path);
  if (a.header.value("kind", "") != "temporal_encoder") {
    throw ContractError("'" + path + "' is not a temporal encoder checkpoint");
  }
  TemporalEncoder enc(TemporalOptions::from_json(a.header.at("options")));
  load_parameters(a, enc.parameters());
  return enc;
}

}  // namespace vcl
