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

#include "acceptance.hpp"

#include "vcl/core/serialize.hpp"
#include "vcl/core/tasks.hpp"
#include "vcl/harness/experiment.hpp"
#include "vcl/harness/metrics.hpp"
#include "vcl/method/mcl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <unistd.h>

namespace fs = std::filesystem;

namespace vcl::acceptance {
namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---- 1. parameter counts ---------------------------------------------------

CriterionResult parameter_counts() {
  CriterionResult r{1, "temporal encoder and prompt parameter counts", false, {}, 0.0};
  const std::int64_t d = 512, f = 2048;
  const std::int64_t per_layer = 4 * (d * d + d) + (d * f + f) + (f * d + d) + 2 * 2 * d;
  const std::int64_t oracle = 3 * per_layer + d;

  TemporalOptions o;
  o.width = 512;
  o.layers = 3;
  o.heads = 2;
  o.ffn_width = 2048;
  o.positional_embeddings = false;
  const TemporalEncoder enc(o);
  const std::int64_t counted = enc.count_parameters();

  Dims dims = Dims::vit_b32();
  dims.prompts_per_task = 1;
  dims.spatial_prompt_len = 3;
  dims.temporal_prompt_len = 3;
  TaskSpec task;
  task.task_index = 1;
  task.class_ids = {0};
  task.class_names = {"a"};
  Matrix key = Matrix::Zero(1, 512);
  key(0, 0) = 1.0;
  const std::int64_t per_task = init_prompt_set(task, dims, key, 1).parameter_count();

  const bool ok = oracle == 9457664 && counted == 9457664 && per_task == 3840 &&
                  prompt_param_count(dims) == 3840 && counted + 10 * per_task == 9496064 &&
                  counted + 20 * per_task == 9534464;
  r.pass = ok;
  r.detail = "encoder " + std::to_string(counted) + ", per task " + std::to_string(per_task) +
             ", 10 tasks " + std::to_string(counted + 10 * per_task) + ", 20 tasks " +
             std::to_string(counted + 20 * per_task);
  return r;
}

// ---- 2. metric oracles -----------------------------------------------------

CriterionResult metric_oracles() {
  CriterionResult r{2, "Acc/BWF against brute-force references", false, {}, 0.0};
  Rng rng(20240611);
  double worst = 0.0;
  bool zero_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + int(uniform_index(rng, 19));
    std::vector<std::vector<double>> a(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
    AccuracyMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        a[i][j] = uniform01(rng);
        m.set(i, j, a[i][j]);
      }
    long double acc = 0.0L, bwf = 0.0L;
    for (int j = 0; j < n; ++j) acc += a[n - 1][j];
    for (int i = 0; i + 1 < n; ++i) bwf += a[i][i] - a[n - 1][i];
    acc /= n;
    bwf /= (n - 1);
    worst = std::max({worst, std::abs(double(acc) - compute_acc(m)),
                      std::abs(double(bwf) - *compute_bwf(m))});

    AccuracyMatrix flat(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) flat.set(i, j, a[j][j]);
    zero_ok = zero_ok && *compute_bwf(flat) == 0.0;
  }
  r.pass = worst <= 1e-12 && zero_ok;
  r.detail = fmt("max deviation %.3g over 1000 matrices", worst) +
             (zero_ok ? ", BWF=0 on no-forgetting matrices" : ", nonzero BWF without forgetting");
  return r;
}

// ---- 3. gradient check -----------------------------------------------------

struct GradStats {
  std::size_t coords = 0, within = 0;
  double worst = 0.0;
  void add(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-7});
    const double rel = std::abs(analytic - numeric) / scale;
    ++coords;
    within += rel <= 1e-3;
    worst = std::max(worst, rel);
  }
};

void check_gradients(std::span<Parameter* const> params, const std::function<double()>& loss,
                     const std::function<void()>& backward, GradStats& stats) {
  for (Parameter* p : params) p->zero_grad();
  backward();
  const double eps = 1e-3;
  for (Parameter* p : params) {
    for (Eigen::Index k = 0; k < p->value.size(); ++k) {
      double& x = p->value.data()[k];
      const double saved = x;
      x = saved + eps;
      const double up = loss();
      x = saved - eps;
      const double down = loss();
      x = saved;
      stats.add(p->grad.data()[k], (up - down) / (2 * eps));
    }
  }
}

CriterionResult gradient_check() {
  CriterionResult r{3, "stage-1/stage-2 gradients against central differences", false, {}, 0.0};
  SyntheticOptions so;
  so.num_classes = 3;
  so.tokens = 4;
  so.input_width = 8;
  so.model_width = 8;
  so.foreground_patches = 1;
  so.seed = 77;
  const SyntheticEncoderSuite suite(so);
  const TextClassBank bank = encode_text(suite.text(), suite.class_names(), so.text_template);

  std::vector<EncodedSample> samples;
  for (int c = 0; c < 3; ++c) {
    VideoSample v = suite.make_sample(c, 2, 1000 + std::uint64_t(c));
    samples.push_back(encode_sample(v, suite.spatial()));
  }

  TemporalOptions o;
  o.width = 8;
  o.layers = 3;
  o.heads = 2;
  o.positional_embeddings = true;
  o.max_positions = 3 + 2;
  o.seed = 5;
  TemporalEncoder f_tp(o);
  // Move away from the small initialisation.
  Rng rng(9);
  for (Parameter* p : f_tp.parameters()) p->value += truncated_normal_matrix(rng, p->value.rows(), p->value.cols(), 0.3);

  const double tau = 0.01;
  GradStats s1, s2;
  const auto params1 = f_tp.parameters();
  check_gradients(
      params1,
      [&] {
        double total = 0.0;
        for (const auto& s : samples) {
          ag::Tape tape;
          const ag::Var v = f_tp.forward_class(tape, tape.constant_ref(s.frame_features));
          total += tape.scalar(mcl_sample_loss(tape, v, s.label, bank, tau));
        }
        return total;
      },
      [&] {
        for (const auto& s : samples) {
          ag::Tape tape;
          const ag::Var v = f_tp.forward_class(tape, tape.constant_ref(s.frame_features), true);
          tape.backward(mcl_sample_loss(tape, v, s.label, bank, tau));
        }
      },
      s1);

  Dims dims;
  dims.frames = 2;
  dims.tokens = 4;
  dims.input_width = 8;
  dims.model_width = 8;
  TaskSpec task;
  task.task_index = 1;
  task.class_ids = {0, 1, 2};
  task.class_names = suite.class_names();
  PromptSet ps = init_prompt_set(task, dims, bank.embeddings(), 3);
  ps.spatial.value += truncated_normal_matrix(rng, ps.spatial.value.rows(), ps.spatial.value.cols(), 0.5);
  ps.temporal.value += truncated_normal_matrix(rng, ps.temporal.value.rows(), ps.temporal.value.cols(), 0.5);
  Parameter* params2[] = {&ps.spatial, &ps.temporal};
  const TemporalEncoder& frozen_tp = f_tp;
  check_gradients(
      params2,
      [&] {
        double total = 0.0;
        for (const auto& s : samples) {
          ag::Tape tape;
          const ag::Var frames =
              prompted_frame_features(tape, s.tokens, tape.frozen(ps.spatial), suite.spatial());
          const ag::Var v = frozen_tp.forward_prompted(tape, tape.frozen(ps.temporal), frames);
          total += tape.scalar(mcl_sample_loss(tape, v, s.label, bank, tau));
        }
        return total;
      },
      [&] {
        for (const auto& s : samples) {
          ag::Tape tape;
          const ag::Var frames =
              prompted_frame_features(tape, s.tokens, tape.parameter(ps.spatial), suite.spatial());
          const ag::Var v = frozen_tp.forward_prompted(tape, tape.parameter(ps.temporal), frames);
          tape.backward(mcl_sample_loss(tape, v, s.label, bank, tau));
        }
      },
      s2);

  const double frac = double(s1.within + s2.within) / double(s1.coords + s2.coords);
  const double worst = std::max(s1.worst, s2.worst);
  r.pass = frac >= 0.99 && worst <= 1e-2;
  r.detail = fmt("%.4f of coordinates within 1e-3, worst %.3g", frac, worst) + " (" +
             std::to_string(s1.coords) + " stage-1, " + std::to_string(s2.coords) + " stage-2)";
  return r;
}

// ---- 4. freeze ledger ------------------------------------------------------

void hash_matrix(Sha256& h, const Matrix& m) { h.update(m); }

std::string spatial_fingerprint(const FrozenSpatialEncoder& f) {
  const auto& p = f.profile();
  Rng rng(3);
  const Matrix probe = truncated_normal_matrix(rng, p.tokens + 2, p.input_width, 1.0);
  Sha256 h;
  hash_matrix(h, f.run_attention_stack(probe));
  return h.hex();
}

std::string text_fingerprint(const FrozenTextEncoder& f, const std::vector<std::string>& names) {
  Sha256 h;
  for (const auto& n : names) hash_matrix(h, f.encode(n));
  hash_matrix(h, f.encode("probe"));
  return h.hex();
}

std::string temporal_fingerprint(const TemporalEncoder& f) {
  Sha256 h;
  for (const Parameter* p : f.parameters()) hash_matrix(h, p->value);
  return h.hex();
}

std::string prompt_fingerprint(const PromptSet& s) {
  Sha256 h;
  hash_matrix(h, s.spatial.value);
  hash_matrix(h, s.temporal.value);
  hash_matrix(h, s.key);
  return h.hex();
}

ExperimentConfig small_stream(Variant v) {
  ExperimentConfig cfg = ExperimentConfig::synthetic_benchmark();
  cfg.variant = v;
  cfg.n_tasks = 3;
  cfg.synthetic.num_classes = 9;
  cfg.synthetic.train_per_class = 12;
  cfg.synthetic.eval_per_class = 4;
  cfg.memory_budget = 18;
  cfg.optimizer.epochs = 3;
  cfg.optimizer.batch_size = 12;
  cfg.seed = 11;
  return cfg;
}

CriterionResult freeze_ledger() {
  CriterionResult r{4, "freeze ledger over a 3-task run", false, {}, 0.0};
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  for (Variant v : {Variant::pivot, Variant::zero_shot}) {
    const ExperimentConfig cfg = small_stream(v);
    const Environment env = make_environment(cfg);
    const auto tasks = split_into_tasks(env.data.class_names, cfg.n_tasks, cfg.seed);
    LearnerState state(cfg, *env.spatial, *env.text);

    const std::string sp0 = spatial_fingerprint(*env.spatial);
    const std::string tx0 = text_fingerprint(*env.text, env.data.class_names);
    const std::string tp0 = temporal_fingerprint(state.f_tp);
    std::vector<std::string> frozen_prompts;

    for (const auto& task : tasks) {
      std::vector<EncodedSample> data;
      for (const auto& s : env.data.train)
        if (std::find(task.class_ids.begin(), task.class_ids.end(), s.label) != task.class_ids.end())
          data.push_back(s);
      train_task(task, data, state);
      expect(spatial_fingerprint(*env.spatial) == sp0, "spatial encoder changed");
      expect(text_fingerprint(*env.text, env.data.class_names) == tx0, "text encoder changed");
      for (std::size_t i = 0; i < frozen_prompts.size(); ++i) {
        expect(prompt_fingerprint(state.pool.at(i)) == frozen_prompts[i],
               "prompt set " + std::to_string(i + 1) + " changed after its task");
      }
      if (state.pool.size() > frozen_prompts.size()) {
        frozen_prompts.push_back(prompt_fingerprint(state.pool.at(state.pool.size() - 1)));
      }
    }

    // Library-side snapshots must agree with the same contracts.
    const auto& snaps = state.ledger.snapshots();
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      expect(snaps[k].spatial == snaps[0].spatial && snaps[k].text == snaps[0].text,
             "ledger: frozen encoder digest moved");
      if (snaps[k].label == "stage2:after") {
        expect(k > 0 && snaps[k - 1].label == "stage2:before" &&
                   snaps[k - 1].temporal == snaps[k].temporal,
               "ledger: stage 2 moved the temporal encoder");
      }
    }

    if (v == Variant::pivot) {
      expect(frozen_prompts.size() == tasks.size(), "pivot did not create one prompt set per task");
      // Direct stage-2 probe: a fresh prompt set trained against the final encoder.
      const std::string before = temporal_fingerprint(state.f_tp);
      TaskSpec extra = tasks.back();
      extra.task_index = int(tasks.size()) + 1;
      PromptSet ps = init_prompt_set(extra, cfg.dims, state.bank.rows_for(extra.class_ids), 99);
      std::vector<EncodedSample> data;
      for (const auto& s : env.data.train)
        if (std::find(extra.class_ids.begin(), extra.class_ids.end(), s.label) != extra.class_ids.end())
          data.push_back(s);
      Rng rng(1);
      std::int64_t updates = 0;
      StageContext ctx{&cfg, env.spatial, &rng, nullptr, extra.task_index, &updates};
      const std::string prompt_before = prompt_fingerprint(ps);
      train_stage2(data, ps, state.f_tp, state.bank, ctx);
      expect(temporal_fingerprint(state.f_tp) == before, "stage 2 changed the temporal encoder");
      expect(prompt_fingerprint(ps) != prompt_before && updates > 0, "stage 2 did not train prompts");
    } else {
      expect(state.updates == 0, "zero_shot performed parameter updates");
      expect(temporal_fingerprint(state.f_tp) == tp0, "zero_shot changed the temporal encoder");
      expect(state.pool.empty(), "zero_shot created prompt sets");
    }
  }
  r.pass = problems.empty();
  if (problems.empty()) {
    r.detail = "encoders, prompt sets and stage-2 temporal digests constant; zero_shot made 0 updates";
  } else {
    for (const auto& p : problems) r.detail += (r.detail.empty() ? "" : "; ") + p;
  }
  return r;
}

// ---- 5. prompt selection ---------------------------------------------------

std::size_t exhaustive_selection(const RowVector& q, const PromptPool& pool) {
  std::size_t best = 0;
  double best_distance = 0.0;
  bool first = true;
  const double qn = std::sqrt(q.squaredNorm());
  for (std::size_t t = 0; t < pool.size(); ++t) {
    const Matrix& keys = pool.at(t).key;
    for (Eigen::Index row = 0; row < keys.rows(); ++row) {
      double dot = 0.0, kk = 0.0;
      for (Eigen::Index c = 0; c < keys.cols(); ++c) {
        dot += q(c) * keys(row, c);
        kk += keys(row, c) * keys(row, c);
      }
      const double distance = 1.0 - dot / (qn * std::sqrt(kk));
      if (first || distance < best_distance - 1e-12) {
        best = t;
        best_distance = distance;
        first = false;
      }
    }
  }
  return best;
}

CriterionResult prompt_selection() {
  CriterionResult r{5, "prompt selection against an exhaustive scan", false, {}, 0.0};
  const int width = 16;
  Rng rng(4242);
  Dims dims;
  dims.frames = 4;
  dims.tokens = 4;
  dims.input_width = width;
  dims.model_width = width;

  auto unit = [&](void) {
    RowVector v(width);
    for (int c = 0; c < width; ++c) v(c) = standard_normal(rng);
    return RowVector(v / v.norm());
  };

  PromptPool pool;
  std::vector<RowVector> all_keys;
  for (int t = 0; t < 4; ++t) {
    TaskSpec task;
    task.task_index = t + 1;
    Matrix keys(3, width);
    for (int k = 0; k < 3; ++k) {
      task.class_ids.push_back(t * 3 + k);
      task.class_names.push_back("c" + std::to_string(t * 3 + k));
      keys.row(k) = unit();
    }
    // Shared rows across tasks exercise the tie rule.
    if (t == 2) keys.row(1) = all_keys[4];
    if (t == 3) keys.row(0) = all_keys[1];
    for (int k = 0; k < 3; ++k) all_keys.push_back(keys.row(k));
    PromptSet s = init_prompt_set(task, dims, keys, 7);
    pool.append(std::move(s));
    pool.freeze_last();
  }

  int agree = 0, ties = 0;
  for (int i = 0; i < 200; ++i) {
    RowVector q;
    if (i % 4 == 0) {
      q = all_keys[std::size_t(i / 4) % all_keys.size()];
      ++ties;
    } else {
      q = unit();
    }
    q *= 0.1 + 10.0 * uniform01(rng);
    agree += select_prompt_index(q, pool) == exhaustive_selection(q, pool);
  }

  // Full path: the query is the unprompted temporal class-token embedding.
  TemporalOptions o;
  o.width = width;
  o.layers = 1;
  o.heads = 2;
  o.seed = 3;
  const TemporalEncoder f_tp(o);
  int agree_path = 0;
  for (int i = 0; i < 20; ++i) {
    EncodedSample s;
    s.frame_features = truncated_normal_matrix(rng, 4, width, 1.0);
    const RowVector q = f_tp.temporal_forward_class(s.frame_features);
    agree_path += select_prompts(s, pool, f_tp) == exhaustive_selection(q, pool);
  }
  r.pass = agree == 200 && agree_path == 20;
  r.detail = std::to_string(agree) + "/200 queries agree (" + std::to_string(ties) +
             " on shared keys), " + std::to_string(agree_path) + "/20 through the temporal query";
  return r;
}

// ---- 6-8. end-to-end -------------------------------------------------------

ResultRecord benchmark_run(Variant v, std::uint64_t seed, std::ostream* progress,
                           double sigma = -1.0, int n_tasks = 5) {
  ExperimentConfig cfg = ExperimentConfig::synthetic_benchmark();
  cfg.variant = v;
  cfg.seed = seed;
  cfg.synthetic.sigma = sigma;
  cfg.n_tasks = n_tasks;
  const ResultRecord rec = run_experiment(cfg);
  if (progress) {
    *progress << "  " << to_string(v) << " seed " << seed << (sigma == 0.0 ? " sigma 0" : "")
              << " tasks " << n_tasks << ": Acc " << rec.acc
              << " BWF " << (rec.bwf ? *rec.bwf : 0.0) << "\n";
    progress->flush();
  }
  return rec;
}

CriterionResult synthetic_ladder(std::ostream* progress) {
  CriterionResult r{6, "synthetic end-to-end ladder", false, {}, 0.0};
  const ResultRecord clean = benchmark_run(Variant::zero_shot, 0, progress, 0.0);
  const bool a = clean.acc == 1.0 && clean.bwf && *clean.bwf == 0.0;
  std::string detail =
      fmt("(a) zero_shot sigma=0 Acc %.4f BWF %.4f", clean.acc, clean.bwf.value_or(-1.0));

  bool b = false, c = true;
  for (std::uint64_t seed : {0, 1, 2}) {
    const ResultRecord pv = benchmark_run(Variant::pivot, seed, progress);
    const double tm = benchmark_run(Variant::temporal_mcl, seed, progress).acc;
    const double zs = benchmark_run(Variant::zero_shot, seed, progress).acc;
    if (seed == 0) {
      b = pv.acc >= 0.95 && pv.bwf && *pv.bwf <= 0.05;
      detail += fmt("; (b) pivot Acc %.4f BWF %.4f", pv.acc, pv.bwf.value_or(-1.0));
    }
    c = c && pv.acc >= tm && tm >= zs;
    detail += fmt("; seed %.0f pivot %.3f", double(seed), pv.acc) +
              fmt(" temporal_mcl %.3f zero_shot %.3f", tm, zs);
  }
  r.pass = a && b && c;
  r.detail = detail;
  return r;
}

CriterionResult task_length_stability(std::ostream* progress) {
  CriterionResult r{7, "zero_shot Acc stable across task counts", false, {}, 0.0};
  const double five = benchmark_run(Variant::zero_shot, 0, progress, -1.0, 5).acc;
  const double ten = benchmark_run(Variant::zero_shot, 0, progress, -1.0, 10).acc;
  r.pass = std::abs(five - ten) < 0.005;
  r.detail = fmt("5 tasks %.4f, 10 tasks %.4f, difference %.4g", five, ten, std::abs(five - ten));
  return r;
}

CriterionResult determinism(const std::string& cli, std::ostream* progress) {
  CriterionResult r{8, "repeated pivot runs are byte-identical", false, {}, 0.0};
  const fs::path base = fs::temp_directory_path() / ("vcl-determinism-" + std::to_string(::getpid()));
  std::string csv[2], json[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = base / std::to_string(k);
    fs::create_directories(out);
    if (!cli.empty()) {
      const std::string cmd =
          "\"" + cli + "\" run --variant pivot --seed 7 -q --out \"" + out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        r.detail = "command failed: " + cmd;
        return r;
      }
    } else {
      ExperimentConfig cfg = ExperimentConfig::synthetic_benchmark();
      cfg.variant = Variant::pivot;
      cfg.seed = 7;
      emit_report(run_experiment(cfg), out.string());
    }
    csv[k] = read_file((out / "accuracy_matrix.csv").string());
    auto j = nlohmann::json::parse(read_file((out / "results.json").string()));
    j.erase("timings");
    json[k] = j.dump();
    if (progress) *progress << "  pivot seed 7 run " << k + 1 << " done\n";
  }
  fs::remove_all(base);
  r.pass = csv[0] == csv[1] && json[0] == json[1];
  r.detail = std::string(cli.empty() ? "in-process" : "CLI") + " runs: matrix CSV " +
             (csv[0] == csv[1] ? "identical" : "differs") + ", results JSON without timings " +
             (json[0] == json[1] ? "identical" : "differs");
  return r;
}

template <typename F>
CriterionResult timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = f();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_criteria(bool include_slow, const std::string& cli,
                                          std::ostream* progress) {
  std::vector<CriterionResult> out;
  auto add = [&](int id, const char* name, auto&& f) {
    CriterionResult r = timed(f);
    r.id = id;
    if (r.name.empty()) r.name = name;
    if (progress) {
      *progress << format_line(r) << "\n";
      progress->flush();
    }
    out.push_back(std::move(r));
  };
  add(1, "parameter counts", parameter_counts);
  add(2, "metric oracles", metric_oracles);
  add(3, "gradient check", gradient_check);
  if (include_slow) add(4, "freeze ledger", freeze_ledger);
  add(5, "prompt selection", prompt_selection);
  if (include_slow) {
    add(6, "synthetic ladder", [&] { return synthetic_ladder(progress); });
    add(7, "task-length stability", [&] { return task_length_stability(progress); });
    add(8, "determinism", [&] { return determinism(cli, progress); });
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::string format_line(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1fs", r.seconds);
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" +
         r.name + ", " + secs + "): " + r.detail;
}

bool run_selftest(std::ostream& out, bool include_slow, const std::string& cli) {
  bool all = true;
  for (const auto& r : run_criteria(include_slow, cli, &out)) all = all && r.pass;
  return all;
}

}  // namespace vcl::acceptance
