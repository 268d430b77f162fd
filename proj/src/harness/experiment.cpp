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

#include "vcl/harness/experiment.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/serialize.hpp"
#include "vcl/core/tasks.hpp"
#include "vcl/encoders/cache.hpp"
#include "vcl/encoders/vit_encoder.hpp"
#include "vcl/harness/metrics.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <regex>

namespace fs = std::filesystem;

namespace vcl {

SyntheticOptions synthetic_options(const ExperimentConfig& cfg) {
  SyntheticOptions o;
  o.num_classes = cfg.synthetic.num_classes;
  o.tokens = cfg.dims.tokens;
  o.input_width = cfg.dims.input_width;
  o.model_width = cfg.dims.model_width;
  o.sigma = cfg.synthetic.sigma;
  o.sigma_fraction = cfg.synthetic.sigma_fraction;
  o.foreground_patches = cfg.synthetic.foreground_patches;
  o.marker_strength = cfg.synthetic.marker_strength;
  o.attention_gain = cfg.synthetic.attention_gain;
  o.seed = cfg.synthetic.encoder_seed;
  o.text_template = cfg.text_template;
  return o;
}

Dataset synthetic_dataset(const SyntheticEncoderSuite& suite, const ExperimentConfig& cfg) {
  Dataset d;
  d.class_names = suite.class_names();
  const auto& s = cfg.synthetic;
  const struct {
    const char* name;
    int count;
    std::vector<EncodedSample>* out;
  } splits[] = {{"train", s.train_per_class, &d.train}, {"eval", s.eval_per_class, &d.eval}};
  for (std::size_t split = 0; split < 2; ++split) {
    for (int c = 0; c < suite.num_classes(); ++c) {
      for (int i = 0; i < splits[split].count; ++i) {
        const std::uint64_t seed =
            derive_seed(cfg.seed, {s.encoder_seed, std::uint64_t(c), split, std::uint64_t(i)});
        VideoSample v = suite.make_sample(c, s.raw_frames, seed);
        char id[96];
        std::snprintf(id, sizeof id, "%s/%s/%04d", splits[split].name,
                      d.class_names[std::size_t(c)].c_str(), i);
        v.source_id = id;
        splits[split].out->push_back(encode_sample(v, suite.spatial()));
      }
    }
  }
  return d;
}

std::unique_ptr<FrozenSpatialEncoder> make_profile_encoder(const std::string& name,
                                                           std::uint64_t seed) {
  if (name == "vit-b32") return std::make_unique<VitSpatialEncoder>(VitOptions::b32(12, seed));
  std::smatch m;
  static const std::regex short_form(R"(vit-b32-d(\d+))");
  if (std::regex_match(name, m, short_form)) {
    return std::make_unique<VitSpatialEncoder>(VitOptions::b32(std::stoi(m[1]), seed));
  }
  static const std::regex long_form(R"(vit-p(\d+)-w(\d+)-d(\d+))");
  if (std::regex_match(name, m, long_form) && m[1] == "32" && m[2] == "768") {
    return std::make_unique<VitSpatialEncoder>(VitOptions::b32(std::stoi(m[3]), seed));
  }
  throw ConfigError("unknown encoder profile '" + name + "'");
}

void apply_cache_profile(ExperimentConfig& cfg) {
  if (cfg.dataset != "cache") return;
  const CacheManifest manifest = read_cache_manifest(cfg.cache_dir);
  cfg.dims.tokens = manifest.profile.at("tokens").get<int>();
  cfg.dims.input_width = manifest.profile.at("input_width").get<int>();
  cfg.dims.model_width = manifest.profile.at("model_width").get<int>();
}

Environment make_environment(const ExperimentConfig& cfg) {
  cfg.validate();
  Environment env;
  if (cfg.dataset == "synthetic") {
    env.suite = std::make_unique<SyntheticEncoderSuite>(synthetic_options(cfg));
    env.spatial = &env.suite->spatial();
    env.text = &env.suite->text();
    env.data = synthetic_dataset(*env.suite, cfg);
    env.metadata["synthetic"] = {{"theta_min", env.suite->theta_min()},
                                 {"sigma_star", env.suite->sigma_star()},
                                 {"sigma", env.suite->sigma()},
                                 {"encoder_gain", env.suite->spatial().gain()}};
  } else {
    const CacheManifest manifest = read_cache_manifest(cfg.cache_dir);
    env.owned_spatial = make_profile_encoder(manifest.profile.at("name").get<std::string>(),
                                             cfg.synthetic.encoder_seed);
    env.spatial = env.owned_spatial.get();
    env.owned_text = std::make_unique<LookupTextEncoder>(env.spatial->profile().model_width,
                                                         cfg.synthetic.encoder_seed);
    env.text = env.owned_text.get();
    env.data.class_names = manifest.class_names;
    for (const VideoSample& v : load_cache(cfg.cache_dir, *env.spatial)) {
      auto& split = v.source_id.rfind("eval/", 0) == 0 ? env.data.eval : env.data.train;
      split.push_back(encode_sample(v, *env.spatial));
    }
    if (env.data.class_names.empty()) throw ConfigError("cache lists no class names");
  }
  env.metadata["profile"] = env.spatial->profile().to_json();
  env.metadata["text_template"] = cfg.text_template;
  env.metadata["preprocessing"] = env.spatial->profile().preprocessing;
  return env;
}

nlohmann::json ResultRecord::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < matrix.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j <= i; ++j) {
      row.push_back(matrix.defined(i, j) ? nlohmann::json(matrix.at(i, j)) : nlohmann::json());
    }
    rows.push_back(row);
  }
  return {{"schema_version", schema_version},
          {"variant", variant},
          {"seed", seed},
          {"memory_budget", memory_budget},
          {"config", config},
          {"accuracy_matrix", rows},
          {"acc", acc},
          {"bwf", bwf ? nlohmann::json(*bwf) : nlohmann::json()},
          {"digests", digests},
          {"metadata", metadata},
          {"parameter_updates", parameter_updates},
          {"timings", {{"task_seconds", task_seconds}}}};
}

ResultRecord ResultRecord::from_json(const nlohmann::json& j) {
  ResultRecord r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != 1) throw InputError("unsupported results schema version");
  r.variant = j.at("variant").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.memory_budget = j.at("memory_budget").get<int>();
  r.config = j.at("config");
  const auto& rows = j.at("accuracy_matrix");
  r.matrix = AccuracyMatrix(int(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      if (!rows[i][k].is_null()) r.matrix.set(int(i), int(k), rows[i][k].get<double>());
    }
  }
  r.acc = j.at("acc").get<double>();
  if (!j.at("bwf").is_null()) r.bwf = j.at("bwf").get<double>();
  r.digests = j.at("digests");
  r.metadata = j.at("metadata");
  r.parameter_updates = j.at("parameter_updates").get<std::int64_t>();
  r.task_seconds = j.at("timings").at("task_seconds").get<std::vector<double>>();
  return r;
}

std::vector<double> evaluate_after_task(
    int i, const LearnerState& state, std::span<const std::vector<const EncodedSample*>> eval_sets) {
  if (i < 0 || std::size_t(i) >= eval_sets.size() || i >= int(state.tasks.size())) {
    throw ContractError("evaluate_after_task: tasks 1.." + std::to_string(i + 1) +
                        " have not been trained");
  }
  std::vector<double> row;
  for (int j = 0; j <= i; ++j) {
    const auto& set = eval_sets[std::size_t(j)];
    if (set.empty()) {
      throw ConfigError("no evaluation samples for task " + std::to_string(j + 1));
    }
    std::size_t correct = 0;
    for (const EncodedSample* s : set) correct += predict(state, *s) == s->label ? 1 : 0;
    row.push_back(double(correct) / double(set.size()));
  }
  return row;
}

ResultRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const Environment env = make_environment(cfg);
  return run_experiment(cfg, env, options);
}

ResultRecord run_experiment(const ExperimentConfig& cfg, const Environment& env,
                            const RunOptions& options) {
  cfg.validate();
  const auto tasks = split_into_tasks(env.data.class_names, cfg.n_tasks, cfg.seed);
  std::map<ClassId, int> task_of;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (ClassId c : tasks[t].class_ids) task_of[c] = int(t);
  }
  std::vector<std::vector<EncodedSample>> train(tasks.size());
  std::vector<std::vector<const EncodedSample*>> eval(tasks.size());
  for (const EncodedSample& s : env.data.train) {
    auto it = task_of.find(s.label);
    if (it == task_of.end()) throw InputError("training sample with unknown label: " + s.source_id);
    train[std::size_t(it->second)].push_back(s);
  }
  for (const EncodedSample& s : env.data.eval) {
    auto it = task_of.find(s.label);
    if (it == task_of.end()) throw InputError("evaluation sample with unknown label: " + s.source_id);
    eval[std::size_t(it->second)].push_back(&s);
  }

  LearnerState state(cfg, *env.spatial, *env.text);
  if (!options.out_dir.empty()) {
    state.log = TrainingLog((fs::path(options.out_dir) / "training_log.jsonl").string());
    state.checkpoint_dir = (fs::path(options.out_dir) / "checkpoints").string();
  }

  ResultRecord rec;
  rec.config = cfg.to_json();
  rec.variant = to_string(cfg.variant);
  rec.seed = cfg.seed;
  rec.memory_budget = cfg.memory_budget;
  rec.matrix = AccuracyMatrix(int(tasks.size()));
  rec.metadata = env.metadata;
  nlohmann::json split = nlohmann::json::array();
  for (const auto& t : tasks) split.push_back(to_json(t));
  rec.metadata["tasks"] = split;

  const std::string temporal_before = state.f_tp.digest();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto start = std::chrono::steady_clock::now();
    train_task(tasks[t], train[t], state);
    const auto row = evaluate_after_task(int(t), state, eval);
    for (std::size_t j = 0; j < row.size(); ++j) rec.matrix.set(int(t), int(j), row[j]);
    rec.task_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (options.progress) {
      double seen = 0.0;
      for (double a : row) seen += a;
      char buf[128];
      std::snprintf(buf, sizeof buf, "task %zu/%zu  mean seen-task accuracy %.4f  (%.1fs)", t + 1,
                    tasks.size(), seen / double(row.size()), rec.task_seconds.back());
      options.progress(buf);
    }
  }
  rec.acc = compute_acc(rec.matrix);
  rec.bwf = compute_bwf(rec.matrix);
  rec.parameter_updates = state.updates;
  rec.digests = {{"spatial_encoder", env.spatial->digest()},
                 {"text_encoder", env.text->digest()},
                 {"temporal_initial", temporal_before},
                 {"temporal_final", state.f_tp.digest()},
                 {"prompt_sets", state.pool.digests()}};
  if (!options.out_dir.empty()) {
    write_file((fs::path(options.out_dir) / "freeze_ledger.json").string(),
               state.ledger.to_json().dump(2) + "\n");
  }
  return rec;
}

void emit_report(const ResultRecord& record, const std::string& out_dir) {
  write_file((fs::path(out_dir) / "results.json").string(), record.to_json().dump(2) + "\n");
  write_file((fs::path(out_dir) / "accuracy_matrix.csv").string(), record.matrix.to_csv());
  std::string curve = "after_task,mean_seen_accuracy\n";
  for (int i = 0; i < record.matrix.size(); ++i) {
    double sum = 0.0;
    int n = 0;
    for (int j = 0; j <= i; ++j) {
      if (record.matrix.defined(i, j)) {
        sum += record.matrix.at(i, j);
        ++n;
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.6f\n", i + 1, n ? sum / n : 0.0);
    curve += buf;
  }
  write_file((fs::path(out_dir) / "curve.csv").string(), curve);
}

ResultRecord load_report(const std::string& dir) {
  const std::string text = read_file((fs::path(dir) / "results.json").string());
  try {
    return ResultRecord::from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed results.json in '" + dir + "': " + e.what());
  }
}

void emit_sweep(std::span<const ResultRecord> records, const std::string& out_dir) {
  std::string ladder = "variant,seed,acc,bwf\n";
  std::string memory = "memory_budget,variant,acc,bwf\n";
  for (const auto& r : records) {
    char acc[32], bwf[32] = "";
    std::snprintf(acc, sizeof acc, "%.6f", r.acc);
    if (r.bwf) std::snprintf(bwf, sizeof bwf, "%.6f", *r.bwf);
    ladder += r.variant + "," + std::to_string(r.seed) + "," + acc + "," + bwf + "\n";
    memory += std::to_string(r.memory_budget) + "," + r.variant + "," + acc + "," + bwf + "\n";
  }
  write_file((fs::path(out_dir) / "ladder.csv").string(), ladder);
  write_file((fs::path(out_dir) / "memory_sweep.csv").string(), memory);
}

}  // namespace vcl
