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

#include "vcl/training/l2p.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"
#include "vcl/core/serialize.hpp"

#include <algorithm>
#include <numeric>

namespace vcl {

SharedPromptPool SharedPromptPool::create(int pool_size, int length, int top_k, int input_width,
                                          int model_width, std::uint64_t seed) {
  if (pool_size < 1 || length < 1 || top_k < 1 || top_k > pool_size) {
    throw ConfigError("shared prompt pool: need 1 <= top_k <= pool_size and positive length");
  }
  Rng rng(derive_seed(seed, {hash_string("shared-pool")}));
  SharedPromptPool p;
  p.top_k = top_k;
  Matrix keys(pool_size, model_width);
  for (int i = 0; i < pool_size; ++i) {
    RowVector k = normal_matrix(rng, 1, model_width).row(0);
    keys.row(i) = k / k.norm();
  }
  p.keys = Parameter("pool.keys", keys);
  for (int i = 0; i < pool_size; ++i) {
    p.prompts.emplace_back("pool.prompt" + std::to_string(i),
                           truncated_normal_matrix(rng, length, input_width, 0.02));
  }
  return p;
}

std::vector<Parameter*> SharedPromptPool::parameters() {
  std::vector<Parameter*> out = {&keys};
  for (auto& p : prompts) out.push_back(&p);
  return out;
}

std::vector<const Parameter*> SharedPromptPool::parameters() const {
  std::vector<const Parameter*> out = {&keys};
  for (const auto& p : prompts) out.push_back(&p);
  return out;
}

std::vector<int> SharedPromptPool::select(const RowVector& query) const {
  const double qn = query.norm();
  if (qn == 0.0) throw SelectionError("shared prompt pool: degenerate query");
  std::vector<double> sim(static_cast<std::size_t>(keys.value.rows()));
  for (Eigen::Index i = 0; i < keys.value.rows(); ++i) {
    sim[std::size_t(i)] = keys.value.row(i).dot(query) / (keys.value.row(i).norm() * qn);
  }
  std::vector<int> idx(sim.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return sim[a] > sim[b]; });
  idx.resize(std::size_t(top_k));
  return idx;
}

LinearHead::LinearHead(int width)
    : weight("head.weight", Matrix(0, width)), bias("head.bias", Matrix(1, 0)) {}

void LinearHead::grow(std::span<const ClassId> ids, Rng& rng) {
  const Eigen::Index width = weight.value.cols();
  const Eigen::Index old = weight.value.rows();
  const Eigen::Index n = old + Eigen::Index(ids.size());
  Matrix w(n, width);
  Matrix b = Matrix::Zero(1, n);
  w.topRows(old) = weight.value;
  w.bottomRows(n - old) = truncated_normal_matrix(rng, n - old, width, 0.02);
  b.leftCols(old) = bias.value;
  for (ClassId c : ids) {
    if (row_of(c) >= 0) throw ContractError("linear head: class already present");
    class_ids.push_back(c);
  }
  weight = Parameter(weight.name, w);
  bias = Parameter(bias.name, b);
}

int LinearHead::row_of(ClassId c) const {
  const auto it = std::find(class_ids.begin(), class_ids.end(), c);
  return it == class_ids.end() ? -1 : int(it - class_ids.begin());
}

RowVector mean_frame_feature(const EncodedSample& sample) {
  return sample.frame_features.colwise().mean();
}

SharedPromptModel::SharedPromptModel(const ExperimentConfig& cfg, const FrozenSpatialEncoder& f_sp)
    : f_sp_(&f_sp),
      pool_(SharedPromptPool::create(cfg.l2p_pool_size, cfg.l2p_prompt_length, cfg.l2p_top_k,
                                     f_sp.profile().input_width, f_sp.profile().model_width,
                                     cfg.seed)),
      head_(f_sp.profile().model_width),
      linear_(uses_linear_head(cfg.variant)),
      temperature_(cfg.temperature),
      key_weight_(cfg.l2p_key_weight) {}

namespace {

template <typename Model>
SharedPromptModel::Pass shared_forward(Model& pool, const FrozenSpatialEncoder& f_sp,
                                       ag::Tape& tape, const EncodedSample& sample,
                                       bool trainable, double key_weight) {
  const auto leaf = [&](auto& p) {
    if constexpr (std::is_const_v<Model>) {
      return tape.frozen(p);
    } else {
      return trainable ? tape.parameter(p) : tape.frozen(p);
    }
  };
  const RowVector query = mean_frame_feature(sample);
  const std::vector<int> chosen = pool.select(query);
  std::vector<ag::Var> parts;
  for (int i : chosen) parts.push_back(leaf(pool.prompts[std::size_t(i)]));
  const ag::Var prompt = tape.concat_rows(parts);
  const ag::Var frames = prompted_frame_features(tape, sample.tokens, prompt, f_sp);
  SharedPromptModel::Pass out;
  out.embedding = tape.mean_rows(frames);

  const ag::Var keys = leaf(pool.keys);
  std::vector<ag::Var> rows;
  for (int i : chosen) rows.push_back(tape.slice_rows(keys, i, 1));
  const ag::Var unit_keys = tape.normalize_rows(tape.concat_rows(rows));
  const ag::Var q = tape.constant(query / query.norm());
  const ag::Var sims = tape.matmul_bt(unit_keys, q);  // k x 1
  const double k = double(chosen.size());
  out.key_loss = tape.add(tape.scale(tape.mean_rows(sims), -k * key_weight),
                          tape.constant(Matrix::Constant(1, 1, k * key_weight)));
  return out;
}

}  // namespace

SharedPromptModel::Pass SharedPromptModel::forward(ag::Tape& tape, const EncodedSample& sample,
                                                   bool trainable) {
  return shared_forward(pool_, *f_sp_, tape, sample, trainable, key_weight_);
}

SharedPromptModel::Pass SharedPromptModel::forward_impl(ag::Tape& tape, const EncodedSample& sample,
                                                        bool) const {
  return shared_forward(pool_, *f_sp_, tape, sample, false, key_weight_);
}

ag::Var SharedPromptModel::loss(ag::Tape& tape, const EncodedSample& sample,
                                const TextClassBank& bank) {
  const Pass pass = forward(tape, sample, true);
  ag::Var cls;
  if (linear_) {
    const int row = head_.row_of(sample.label);
    if (row < 0) throw ContractError("linear head: label missing");
    const ag::Var logits = tape.add_row(
        tape.matmul_bt(pass.embedding, tape.parameter(head_.weight)), tape.parameter(head_.bias));
    cls = tape.cross_entropy(logits, row);
  } else {
    cls = mcl_sample_loss(tape, pass.embedding, sample.label, bank, temperature_);
  }
  return tape.add(cls, pass.key_loss);
}

ClassId SharedPromptModel::predict(const EncodedSample& sample, const TextClassBank& bank) const {
  ag::Tape tape;
  const RowVector v = tape.value(forward_impl(tape, sample, false).embedding).row(0);
  if (!linear_) return mcl_classify(v, bank, temperature_).class_id;
  // Restricted to the classes of the evaluation bank.
  ClassId best = -1;
  double best_logit = 0.0;
  for (ClassId c : bank.class_ids()) {
    const int r = head_.row_of(c);
    if (r < 0) throw ContractError("linear head: evaluation class missing");
    double logit = head_.bias.value(0, r);
    for (Eigen::Index k = 0; k < v.size(); ++k) logit += head_.weight.value(r, k) * v(k);
    if (best < 0 || logit > best_logit || (logit == best_logit && c < best)) {
      best = c;
      best_logit = logit;
    }
  }
  return best;
}

std::vector<Parameter*> SharedPromptModel::parameters() {
  std::vector<Parameter*> out = pool_.parameters();
  if (linear_) {
    for (Parameter* p : head_.parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const Parameter*> SharedPromptModel::parameters() const {
  std::vector<const Parameter*> out = pool_.parameters();
  if (linear_) {
    for (const Parameter* p : head_.parameters()) out.push_back(p);
  }
  return out;
}

std::string SharedPromptModel::digest() const { return digest_parameters(parameters()); }

}  // namespace vcl
