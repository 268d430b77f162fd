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

#include "vcl/core/accuracy_matrix.hpp"
#include "vcl/core/config.hpp"
#include "vcl/encoders/synthetic.hpp"
#include "vcl/training/trainer.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vcl {

/// Encoded train/eval splits with class names (class id = index).
struct Dataset {
  std::vector<std::string> class_names;
  std::vector<EncodedSample> train;
  std::vector<EncodedSample> eval;
};

/// Frozen encoders plus the encoded dataset for one experiment.
struct Environment {
  std::unique_ptr<SyntheticEncoderSuite> suite;  // synthetic datasets only
  std::unique_ptr<FrozenSpatialEncoder> owned_spatial;
  std::unique_ptr<FrozenTextEncoder> owned_text;
  const FrozenSpatialEncoder* spatial = nullptr;
  const FrozenTextEncoder* text = nullptr;
  Dataset data;
  nlohmann::json metadata = nlohmann::json::object();
};

SyntheticOptions synthetic_options(const ExperimentConfig& cfg);

/// Seeded synthetic splits. Every sample's seed depends only on the run seed,
/// the class, the split and its index, never on the task split.
Dataset synthetic_dataset(const SyntheticEncoderSuite& suite, const ExperimentConfig& cfg);

/// Encoder for a cache profile name: "vit-b32", "vit-b32-d<depth>" or a
/// name produced by VitSpatialEncoder.
std::unique_ptr<FrozenSpatialEncoder> make_profile_encoder(const std::string& name,
                                                           std::uint64_t seed);

/// Copies the token count and widths of the cache's encoder profile into
/// `cfg` (cached datasets only).
void apply_cache_profile(ExperimentConfig& cfg);

Environment make_environment(const ExperimentConfig& cfg);

struct ResultRecord {
  int schema_version = 1;
  nlohmann::json config;
  std::string variant;
  std::uint64_t seed = 0;
  int memory_budget = 0;
  AccuracyMatrix matrix;
  double acc = 0.0;
  std::optional<double> bwf;
  nlohmann::json digests = nlohmann::json::object();
  nlohmann::json metadata = nlohmann::json::object();
  std::int64_t parameter_updates = 0;
  std::vector<double> task_seconds;  // reported in the separate timings field

  /// Deterministic content; timings live under "timings" only.
  nlohmann::json to_json() const;
  static ResultRecord from_json(const nlohmann::json& j);
};

struct RunOptions {
  std::string out_dir;  // training log and checkpoints; empty disables both
  std::function<void(const std::string&)> progress;
};

/// Row i (zero-based) of the accuracy matrix: accuracy on each seen task's
/// evaluation set with the bank of all seen classes. Throws ConfigError when
/// a task has no evaluation samples.
std::vector<double> evaluate_after_task(int i, const LearnerState& state,
                                        std::span<const std::vector<const EncodedSample*>> eval_sets);

ResultRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});
ResultRecord run_experiment(const ExperimentConfig& cfg, const Environment& env,
                            const RunOptions& options = {});

/// results.json, accuracy_matrix.csv and curve.csv (after_task, acc_seen,
/// mean over seen tasks).
void emit_report(const ResultRecord& record, const std::string& out_dir);
ResultRecord load_report(const std::string& dir);

/// ladder.csv (variant, seed, acc, bwf) and memory_sweep.csv (memory_budget,
/// variant, acc, bwf), one row per record.
void emit_sweep(std::span<const ResultRecord> records, const std::string& out_dir);

}  // namespace vcl
