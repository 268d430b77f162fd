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
#include "vcl/core/replay_memory.hpp"
#include "vcl/encoders/text_encoder.hpp"
#include "vcl/method/forward.hpp"
#include "vcl/training/l2p.hpp"
#include "vcl/training/optimizer.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vcl {

enum class Stage { adaptation, prompt_generation, prompt_selection, shared_prompting };
std::string to_string(Stage s);

/// One line of the per-stage training log.
struct StageRecord {
  int task = 0;
  Stage stage = Stage::adaptation;
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double wall_seconds = 0.0;
  nlohmann::json to_json() const;
};

/// Line-delimited JSON training log, optionally mirrored to a file.
class TrainingLog {
 public:
  TrainingLog() = default;
  explicit TrainingLog(std::string path);
  void add(const StageRecord& r);
  const std::vector<StageRecord>& records() const { return records_; }

 private:
  std::string path_;
  std::vector<StageRecord> records_;
};

/// Digests captured at a stage boundary.
struct FreezeSnapshot {
  int task = 0;
  std::string label;  // e.g. "stage2:after"
  std::string spatial;
  std::string text;
  std::string temporal;
  std::string shared;
  std::vector<std::string> prompts;
};

/// Records digests at every stage boundary and enforces the freeze
/// contracts: frozen encoders never change, a prompt set never changes once
/// frozen, and prompt generation leaves the temporal encoder untouched.
class FreezeLedger {
 public:
  /// Throws ContractError on a violation.
  void record(FreezeSnapshot s);
  const std::vector<FreezeSnapshot>& snapshots() const { return snapshots_; }
  nlohmann::json to_json() const;

 private:
  std::vector<FreezeSnapshot> snapshots_;
};

/// Everything that persists across tasks.
struct LearnerState {
  LearnerState(const ExperimentConfig& cfg, const FrozenSpatialEncoder& f_sp,
               const FrozenTextEncoder& f_text);

  ExperimentConfig cfg;
  const FrozenSpatialEncoder* f_sp;
  const FrozenTextEncoder* f_text;
  TemporalEncoder f_tp;
  PromptPool pool;
  TextClassBank bank;
  ReplayMemory memory;
  std::unique_ptr<SharedPromptModel> shared;
  std::vector<TaskSpec> tasks;
  FreezeLedger ledger;
  TrainingLog log;
  Rng rng;
  std::int64_t updates = 0;  // optimizer steps over the whole run
  std::string checkpoint_dir;  // empty disables checkpoints

  FreezeSnapshot snapshot(const std::string& label) const;
};

/// Options shared by the stage loops.
struct StageContext {
  const ExperimentConfig* cfg;
  const FrozenSpatialEncoder* f_sp;
  Rng* rng;
  TrainingLog* log = nullptr;
  int task = 0;
  std::int64_t* updates = nullptr;
};

/// Adaptation: temporal encoder on the class-token path over the task's data.
void train_stage1(std::span<const EncodedSample> data, TemporalEncoder& f_tp,
                  const TextClassBank& bank, const StageContext& ctx);

/// Prompt generation: only the prompt tensors of `prompts` are trained. Throws
/// ContractError for a frozen prompt set.
void train_stage2(std::span<const EncodedSample> data, PromptSet& prompts,
                  const TemporalEncoder& f_tp, const TextClassBank& bank, const StageContext& ctx);

/// Prompt selection: temporal encoder over replay memory with the prompted term (prompts
/// chosen by the selector) plus the unprompted term. Throws ContractError for
/// empty memory.
void train_stage3(std::span<const EncodedSample> memory, const PromptPool& pool,
                  TemporalEncoder& f_tp, const TextClassBank& bank, const StageContext& ctx,
                  bool prompted_term = true);

/// Combined stage-3 loss for a fixed batch (prompted + unprompted), evaluated
/// without training; prompts are selected with the current encoder.
double stage3_loss(std::span<const EncodedSample> batch, const PromptPool& pool,
                   const TemporalEncoder& f_tp, const FrozenSpatialEncoder& f_sp,
                   const TextClassBank& bank, double temperature, bool prompted_term = true);

/// Adds a task's exemplars (centre-sampled to T frames) and rebalances.
void update_memory(ReplayMemory& memory, std::span<const EncodedSample> task_data,
                   const TaskSpec& task, int frames, std::uint64_t seed,
                   bool allow_empty_classes = false);

/// Centre (evaluation) or random (training) segment sampling down to
/// `frames` frames. Returns `sample` itself when no sampling is needed.
const EncodedSample& sampled_view(const EncodedSample& sample, int frames, bool training, Rng* rng,
                                  EncodedSample& scratch);

/// Runs one task for the configured variant. Tasks must arrive in order.
void train_task(const TaskSpec& task, std::span<const EncodedSample> task_data,
                LearnerState& state);

/// Prediction of the current model for one evaluation sample.
ClassId predict(const LearnerState& state, const EncodedSample& sample);

/// Writes the temporal encoder, prompt pool, bank and memory manifest.
void save_checkpoint(const LearnerState& state, const std::string& dir);

}  // namespace vcl
