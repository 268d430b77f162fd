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

#include "vcl/training/trainer.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/serialize.hpp"
#include "vcl/encoders/frames.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fs = std::filesystem;

namespace vcl {

std::string to_string(Stage s) {
  switch (s) {
    case Stage::adaptation: return "adaptation";
    case Stage::prompt_generation: return "prompt_generation";
    case Stage::prompt_selection: return "prompt_selection";
    case Stage::shared_prompting: return "shared_prompting";
  }
  return "unknown";
}

nlohmann::json StageRecord::to_json() const {
  return {{"task", task},
          {"stage", to_string(stage)},
          {"epoch", epoch},
          {"mean_loss", mean_loss},
          {"train_accuracy", train_accuracy},
          {"wall_seconds", wall_seconds}};
}

TrainingLog::TrainingLog(std::string path) : path_(std::move(path)) {
  if (!path_.empty()) write_file(path_, "");
}

void TrainingLog::add(const StageRecord& r) {
  records_.push_back(r);
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to training log '" + path_ + "'");
  out << r.to_json().dump() << '\n';
}

void FreezeLedger::record(FreezeSnapshot s) {
  if (!snapshots_.empty()) {
    const FreezeSnapshot& first = snapshots_.front();
    const FreezeSnapshot& prev = snapshots_.back();
    if (s.spatial != first.spatial) {
      throw ContractError("freeze violation at " + s.label + ": spatial encoder changed");
    }
    if (s.text != first.text) {
      throw ContractError("freeze violation at " + s.label + ": text encoder changed");
    }
    if (s.label == "stage2:after" && prev.label == "stage2:before" && s.temporal != prev.temporal) {
      throw ContractError("freeze violation: prompt generation changed the temporal encoder");
    }
    // Prompt sets recorded at the last task end are frozen.
    for (auto it = snapshots_.rbegin(); it != snapshots_.rend(); ++it) {
      if (it->label != "task:end") continue;
      for (std::size_t i = 0; i < it->prompts.size(); ++i) {
        if (i >= s.prompts.size() || s.prompts[i] != it->prompts[i]) {
          throw ContractError("freeze violation at " + s.label + ": prompt set " +
                              std::to_string(i + 1) + " changed after its task ended");
        }
      }
      break;
    }
  }
  snapshots_.push_back(std::move(s));
}

nlohmann::json FreezeLedger::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : snapshots_) {
    out.push_back({{"task", s.task},
                   {"label", s.label},
                   {"spatial", s.spatial},
                   {"text", s.text},
                   {"temporal", s.temporal},
                   {"shared", s.shared},
                   {"prompts", s.prompts}});
  }
  return out;
}

namespace {

TemporalOptions temporal_options(const ExperimentConfig& cfg) {
  TemporalOptions o;
  o.width = cfg.dims.model_width;
  o.layers = cfg.temporal_layers;
  o.heads = cfg.temporal_heads;
  o.ffn_width = cfg.effective_ffn_width();
  o.positional_embeddings = cfg.positional_embeddings;
  o.max_positions = std::max(cfg.dims.temporal_prompt_rows(), 1) + cfg.dims.frames;
  o.seed = cfg.seed;
  return o;
}

struct StepOutcome {
  ag::Var loss;
  bool correct = false;
};

/// Predicted bank row from a logits row, lowest class id on ties.
int argmax_row(const Matrix& logits, const TextClassBank& bank) {
  int best = 0;
  for (int r = 1; r < int(logits.cols()); ++r) {
    if (logits(0, r) > logits(0, best) ||
        (logits(0, r) == logits(0, best) && bank.class_ids()[r] < bank.class_ids()[best])) {
      best = r;
    }
  }
  return best;
}

StepOutcome mcl_step(ag::Tape& tape, ag::Var v, ClassId label, const TextClassBank& bank,
                     double temperature) {
  const int row = bank.row_of_or(label);
  if (row < 0) throw ContractError("label " + std::to_string(label) + " is not in the bank");
  const ag::Var logits = mcl_logits(tape, v, bank, temperature);
  return {tape.cross_entropy(logits, row), argmax_row(tape.value(logits), bank) == row};
}

/// Shuffled mini-batch loop shared by every stage.
template <typename StepFn>
void run_stage(Stage stage, std::size_t n, std::span<Parameter* const> params,
               const OptimizerSettings& settings, const StageContext& ctx, StepFn&& step) {
  const auto opt = make_optimizer(settings);
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= settings.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, *ctx.rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    int batch_index = 0;
    for (std::size_t b = 0; b < n; b += std::size_t(settings.batch_size), ++batch_index) {
      const std::size_t end = std::min(n, b + std::size_t(settings.batch_size));
      const double weight = 1.0 / double(end - b);
      for (Parameter* p : params) p->zero_grad();
      for (std::size_t i = b; i < end; ++i) {
        ag::Tape tape;
        const StepOutcome out = step(tape, order[i]);
        const double l = tape.scalar(out.loss);
        if (!std::isfinite(l)) {
          std::ostringstream msg;
          msg << "non-finite loss in " << to_string(stage) << " (task " << ctx.task << ", epoch "
              << epoch << ", batch " << batch_index << ", lr " << settings.learning_rate
              << ", grad norm so far " << gradient_norm(params) << ")";
          throw TrainingError(msg.str());
        }
        loss_sum += l;
        correct += out.correct ? 1 : 0;
        tape.backward(out.loss, weight);
      }
      const double gnorm = gradient_norm(params);
      if (!std::isfinite(gnorm)) {
        std::ostringstream msg;
        msg << "non-finite gradient in " << to_string(stage) << " (task " << ctx.task
            << ", epoch " << epoch << ", batch " << batch_index << ", lr "
            << settings.learning_rate << ")";
        throw TrainingError(msg.str());
      }
      opt->step(params);
      if (ctx.updates) ++*ctx.updates;
    }
    if (ctx.log) {
      StageRecord r;
      r.task = ctx.task;
      r.stage = stage;
      r.epoch = epoch;
      r.mean_loss = n ? loss_sum / double(n) : 0.0;
      r.train_accuracy = n ? double(correct) / double(n) : 0.0;
      r.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      ctx.log->add(r);
    }
  }
}

Matrix prompted_features_value(const EncodedSample& s, const PromptSet& p,
                               const FrozenSpatialEncoder& f_sp) {
  ag::Tape tape;
  return tape.value(prompted_frame_features(tape, s.tokens, tape.frozen(p.spatial), f_sp));
}

}  // namespace

const EncodedSample& sampled_view(const EncodedSample& sample, int frames, bool training,
                                  Rng* rng, EncodedSample& scratch) {
  const int raw = static_cast<int>(sample.tokens.size());
  if (raw == frames) return sample;
  const auto idx = segment_indices(raw, frames, training, rng);
  scratch.tokens.clear();
  scratch.frame_features.resize(frames, sample.frame_features.cols());
  for (int t = 0; t < frames; ++t) {
    scratch.tokens.push_back(sample.tokens[std::size_t(idx[std::size_t(t)])]);
    scratch.frame_features.row(t) = sample.frame_features.row(idx[std::size_t(t)]);
  }
  scratch.label = sample.label;
  scratch.source_id = sample.source_id;
  return scratch;
}

void train_stage1(std::span<const EncodedSample> data, TemporalEncoder& f_tp,
                  const TextClassBank& bank, const StageContext& ctx) {
  const auto params = f_tp.parameters();
  const DropoutContext dropout{ctx.cfg->dropout, ctx.rng};
  EncodedSample scratch;
  run_stage(Stage::adaptation, data.size(), params, ctx.cfg->optimizer, ctx,
            [&](ag::Tape& tape, std::size_t i) {
              const EncodedSample& s =
                  sampled_view(data[i], ctx.cfg->dims.frames, true, ctx.rng, scratch);
              const ag::Var v =
                  f_tp.forward_class(tape, tape.constant_ref(s.frame_features), true, dropout);
              return mcl_step(tape, v, s.label, bank, ctx.cfg->temperature);
            });
}

void train_stage2(std::span<const EncodedSample> data, PromptSet& prompts,
                  const TemporalEncoder& f_tp, const TextClassBank& bank,
                  const StageContext& ctx) {
  if (prompts.frozen) {
    throw ContractError("stage 2: prompt set of task " + std::to_string(prompts.task_index) +
                        " is frozen");
  }
  Parameter* params[] = {&prompts.spatial, &prompts.temporal};
  EncodedSample scratch;
  run_stage(Stage::prompt_generation, data.size(), params, ctx.cfg->optimizer, ctx,
            [&](ag::Tape& tape, std::size_t i) {
              const EncodedSample& s =
                  sampled_view(data[i], ctx.cfg->dims.frames, true, ctx.rng, scratch);
              const ag::Var frames = prompted_frame_features(
                  tape, s.tokens, tape.parameter(prompts.spatial), *ctx.f_sp);
              const ag::Var v =
                  f_tp.forward_prompted(tape, tape.parameter(prompts.temporal), frames);
              return mcl_step(tape, v, s.label, bank, ctx.cfg->temperature);
            });
}

void train_stage3(std::span<const EncodedSample> memory, const PromptPool& pool,
                  TemporalEncoder& f_tp, const TextClassBank& bank, const StageContext& ctx,
                  bool prompted_term) {
  if (memory.empty()) throw ContractError("stage 3: replay memory is empty");
  if (prompted_term && pool.empty()) throw ContractError("stage 3: prompt pool is empty");
  const auto params = f_tp.parameters();
  const DropoutContext dropout{ctx.cfg->dropout, ctx.rng};
  // Prompted frame features depend only on frozen parts; computed once per
  // (sample, prompt set).
  std::vector<std::map<std::size_t, Matrix>> memo(memory.size());
  run_stage(Stage::prompt_selection, memory.size(), params, ctx.cfg->optimizer, ctx,
            [&](ag::Tape& tape, std::size_t i) {
              const EncodedSample& s = memory[i];
              const ag::Var plain = f_tp.forward_class(tape, tape.constant_ref(s.frame_features),
                                                       true, dropout);
              StepOutcome unprompted = mcl_step(tape, plain, s.label, bank, ctx.cfg->temperature);
              if (!prompted_term) return unprompted;
              const std::size_t idx = select_prompt_index(
                  std::as_const(f_tp).temporal_forward_class(s.frame_features), pool);
              auto it = memo[i].find(idx);
              if (it == memo[i].end()) {
                it = memo[i].emplace(idx, prompted_features_value(s, pool.at(idx), *ctx.f_sp)).first;
              }
              const ag::Var v = f_tp.forward_prompted(tape, tape.frozen(pool.at(idx).temporal),
                                                      tape.constant_ref(it->second), true, dropout);
              const StepOutcome prompted = mcl_step(tape, v, s.label, bank, ctx.cfg->temperature);
              return StepOutcome{tape.add(prompted.loss, unprompted.loss), prompted.correct};
            });
}

double stage3_loss(std::span<const EncodedSample> batch, const PromptPool& pool,
                   const TemporalEncoder& f_tp, const FrozenSpatialEncoder& f_sp,
                   const TextClassBank& bank, double temperature, bool prompted_term) {
  if (batch.empty()) throw ContractError("stage 3: empty batch");
  double total = 0.0;
  for (const EncodedSample& s : batch) {
    ag::Tape tape;
    total += tape.scalar(mcl_sample_loss(
        tape, f_tp.forward_class(tape, tape.constant_ref(s.frame_features)), s.label, bank,
        temperature));
    if (prompted_term) {
      const std::size_t idx =
          select_prompt_index(f_tp.temporal_forward_class(s.frame_features), pool);
      const Matrix frames = prompted_features_value(s, pool.at(idx), f_sp);
      const ag::Var v =
          f_tp.forward_prompted(tape, tape.frozen(pool.at(idx).temporal), tape.constant(frames));
      total += tape.scalar(mcl_sample_loss(tape, v, s.label, bank, temperature));
    }
  }
  return total / double(batch.size());
}

void update_memory(ReplayMemory& memory, std::span<const EncodedSample> task_data,
                   const TaskSpec& task, int frames, std::uint64_t seed,
                   bool allow_empty_classes) {
  std::map<ClassId, std::vector<VideoSample>> candidates;
  for (ClassId c : task.class_ids) candidates[c];
  EncodedSample scratch;
  for (const EncodedSample& s : task_data) {
    auto it = candidates.find(s.label);
    if (it == candidates.end()) {
      throw ContractError("update_memory: sample label " + std::to_string(s.label) +
                          " is not in task " + std::to_string(task.task_index));
    }
    it->second.push_back(to_video_sample(sampled_view(s, frames, false, nullptr, scratch)));
  }
  Rng rng(derive_seed(seed, {hash_string("memory"), std::uint64_t(task.task_index)}));
  memory.add_task(candidates, rng, allow_empty_classes);
}

LearnerState::LearnerState(const ExperimentConfig& c, const FrozenSpatialEncoder& sp,
                           const FrozenTextEncoder& text)
    : cfg(c),
      f_sp(&sp),
      f_text(&text),
      f_tp(temporal_options(c)),
      bank(text.width(), c.text_template),
      memory(c.memory_budget),
      rng(derive_seed(c.seed, {hash_string("training")})) {
  if (sp.profile().model_width != c.dims.model_width || text.width() != c.dims.model_width) {
    throw ConfigError("encoder model width does not match the configured model_width");
  }
  if (sp.profile().input_width != c.dims.input_width) {
    throw ConfigError("encoder input width does not match the configured input_width");
  }
  if (uses_shared_prompt_pool(c.variant)) shared = std::make_unique<SharedPromptModel>(c, sp);
}

FreezeSnapshot LearnerState::snapshot(const std::string& label) const {
  FreezeSnapshot s;
  s.task = int(tasks.size()) + 1;
  s.label = label;
  s.spatial = f_sp->digest();
  s.text = f_text->digest();
  s.temporal = f_tp.digest();
  s.shared = shared ? shared->digest() : "";
  s.prompts = pool.digests();
  return s;
}

namespace {

std::vector<EncodedSample> encoded_memory(const LearnerState& state) {
  std::vector<EncodedSample> out;
  for (const VideoSample* s : state.memory.samples()) out.push_back(encode_sample(*s, *state.f_sp));
  return out;
}

void train_shared(std::span<const EncodedSample> data, LearnerState& state,
                  const StageContext& ctx) {
  OptimizerSettings settings = state.cfg.optimizer;
  settings.method = "adam";
  settings.learning_rate = state.cfg.l2p_learning_rate;
  settings.momentum = 0.0;
  SharedPromptModel& model = *state.shared;
  const auto params = model.parameters();
  EncodedSample scratch;
  run_stage(Stage::shared_prompting, data.size(), params, settings, ctx,
            [&](ag::Tape& tape, std::size_t i) {
              const EncodedSample& s =
                  sampled_view(data[i], state.cfg.dims.frames, true, ctx.rng, scratch);
              return StepOutcome{model.loss(tape, s, state.bank), false};
            });
}

}  // namespace

void train_task(const TaskSpec& task, std::span<const EncodedSample> task_data,
                LearnerState& state) {
  const ExperimentConfig& cfg = state.cfg;
  if (task.task_index != int(state.tasks.size()) + 1) {
    throw ContractError("train_task: expected task " + std::to_string(state.tasks.size() + 1) +
                        ", got task " + std::to_string(task.task_index));
  }
  const TextClassBank task_bank =
      encode_text(*state.f_text, task.class_names, cfg.text_template, task.class_ids);
  state.bank.append(task.class_ids, task_bank.embeddings());
  state.ledger.record(state.snapshot("task:start"));

  StageContext ctx{&cfg, state.f_sp, &state.rng, &state.log, task.task_index, &state.updates};
  const int frames = cfg.dims.frames;
  const Variant v = cfg.variant;

  if (v == Variant::temporal_mcl || v == Variant::pivot_no_prompts) {
    train_stage1(task_data, state.f_tp, state.bank, ctx);
    state.ledger.record(state.snapshot("stage1:after"));
    if (cfg.memory_budget > 0) {
      update_memory(state.memory, task_data, task, frames, cfg.seed);
      if (cfg.stage3) {
        const auto mem = encoded_memory(state);
        train_stage3(mem, state.pool, state.f_tp, state.bank, ctx, false);
        state.ledger.record(state.snapshot("stage3:after"));
      }
    }
  } else if (v == Variant::pivot) {
    train_stage1(task_data, state.f_tp, state.bank, ctx);
    state.ledger.record(state.snapshot("stage1:after"));
    state.pool.append(init_prompt_set(task, cfg.dims, state.bank.rows_for(task.class_ids),
                                      cfg.seed));
    state.ledger.record(state.snapshot("stage2:before"));
    train_stage2(task_data, state.pool.back(), state.f_tp, state.bank, ctx);
    state.ledger.record(state.snapshot("stage2:after"));
    state.pool.freeze_last();
    if (cfg.memory_budget > 0) {
      update_memory(state.memory, task_data, task, frames, cfg.seed, !cfg.stage3);
    }
    if (cfg.stage3 && !state.memory.empty()) {
      const auto mem = encoded_memory(state);
      train_stage3(mem, state.pool, state.f_tp, state.bank, ctx, cfg.stage3_prompted_term);
      state.ledger.record(state.snapshot("stage3:after"));
    }
  } else if (uses_shared_prompt_pool(v)) {
    if (state.shared->linear()) state.shared->head().grow(task.class_ids, state.rng);
    std::vector<EncodedSample> data(task_data.begin(), task_data.end());
    if (uses_replay(v) && cfg.memory_budget > 0) {
      for (auto& s : encoded_memory(state)) data.push_back(std::move(s));
    }
    train_shared(data, state, ctx);
    state.ledger.record(state.snapshot("shared:after"));
    if (uses_replay(v) && cfg.memory_budget > 0) {
      update_memory(state.memory, task_data, task, frames, cfg.seed);
    }
  }

  state.tasks.push_back(task);
  state.ledger.record(state.snapshot("task:end"));
  if (!state.checkpoint_dir.empty()) {
    save_checkpoint(state, (fs::path(state.checkpoint_dir) /
                            ("task_" + std::to_string(task.task_index)))
                               .string());
  }
}

ClassId predict(const LearnerState& state, const EncodedSample& sample) {
  EncodedSample scratch;
  const EncodedSample& s = sampled_view(sample, state.cfg.dims.frames, false, nullptr, scratch);
  const double tau = state.cfg.temperature;
  switch (state.cfg.variant) {
    case Variant::zero_shot:
      return mcl_classify(mean_frame_feature(s), state.bank, tau).class_id;
    case Variant::temporal_mcl:
    case Variant::pivot_no_prompts:
      return forward_unprompted(s, state.f_tp, state.bank, tau).class_id;
    case Variant::pivot:
      return forward_with_selection(s, state.pool, *state.f_sp, state.f_tp, state.bank, tau)
          .class_id;
    case Variant::spatial_prompting_linear:
    case Variant::memory_linear:
    case Variant::memory_mcl:
      return state.shared->predict(s, state.bank);
  }
  throw ConfigError("unknown variant");
}

void save_checkpoint(const LearnerState& state, const std::string& dir) {
  fs::create_directories(dir);
  state.f_tp.save((fs::path(dir) / "temporal.vclt").string());
  if (!state.pool.empty()) {
    fs::create_directories(fs::path(dir) / "prompts");
    state.pool.save((fs::path(dir) / "prompts").string());
  }
  TensorArchive bank;
  bank.header = {{"kind", "text_bank"},
                 {"class_ids", state.bank.class_ids()},
                 {"template", state.bank.text_template()}};
  bank.tensors.push_back({"embeddings", state.bank.embeddings()});
  write_tensor_archive((fs::path(dir) / "bank.vclt").string(), bank);
  if (state.shared) {
    TensorArchive a;
    a.header = {{"kind", "shared_prompt_model"}, {"head_classes", state.shared->head().class_ids}};
    for (const Parameter* p : state.shared->parameters()) a.tensors.push_back({p->name, p->value});
    write_tensor_archive((fs::path(dir) / "shared.vclt").string(), a);
  }
  nlohmann::json mem = {{"budget", state.memory.budget()}, {"classes", nlohmann::json::array()}};
  for (ClassId c : state.memory.class_order()) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& s : state.memory.store().at(c)) ids.push_back(s.source_id);
    mem["classes"].push_back({{"class_id", c}, {"samples", ids}});
  }
  write_file((fs::path(dir) / "memory.json").string(), mem.dump(2) + "\n");
}

}  // namespace vcl
