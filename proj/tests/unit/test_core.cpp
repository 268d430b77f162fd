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

#include "helpers.hpp"

#include "vcl/core/accuracy_matrix.hpp"
#include "vcl/core/config.hpp"
#include "vcl/core/errors.hpp"
#include "vcl/core/replay_memory.hpp"
#include "vcl/core/serialize.hpp"
#include "vcl/core/tasks.hpp"
#include "vcl/core/text_bank.hpp"

#include <algorithm>
#include <set>

using namespace vcl;
using namespace vcl::testing;

namespace {

std::vector<std::string> names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("class " + std::to_string(i));
  return out;
}

VideoSample cached_sample(ClassId label, int tag) {
  VideoSample s;
  s.label = label;
  s.source_id = std::to_string(label) + "/" + std::to_string(tag);
  s.cached_tokens = {Matrix::Constant(2, 3, double(tag))};
  return s;
}

}  // namespace

TEST_SUITE("tasks") {
  TEST_CASE("partition property over seeds and task counts") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      for (int n_tasks : {1, 2, 3, 5, 7, 20}) {
        const auto tasks = split_into_tasks(names(20), n_tasks, seed);
        REQUIRE(tasks.size() == std::size_t(n_tasks));
        std::multiset<ClassId> seen;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          CHECK(tasks[t].task_index == int(t) + 1);
          CHECK(std::is_sorted(tasks[t].class_ids.begin(), tasks[t].class_ids.end()));
          CHECK(tasks[t].class_ids.size() == tasks[t].class_names.size());
          seen.insert(tasks[t].class_ids.begin(), tasks[t].class_ids.end());
        }
        CHECK(seen.size() == 20);
        CHECK(std::set<ClassId>(seen.begin(), seen.end()).size() == 20);
      }
    }
  }

  TEST_CASE("uneven splits put leftovers on the earliest tasks") {
    const auto tasks = split_into_tasks(names(10), 3, 4);
    CHECK(tasks[0].class_ids.size() == 4);
    CHECK(tasks[1].class_ids.size() == 3);
    CHECK(tasks[2].class_ids.size() == 3);
  }

  TEST_CASE("split is a function of the seed") {
    const auto a = split_into_tasks(names(20), 5, 9);
    const auto b = split_into_tasks(names(20), 5, 9);
    const auto c = split_into_tasks(names(20), 5, 10);
    bool same = true, differs = false;
    for (int t = 0; t < 5; ++t) {
      same = same && a[t].class_ids == b[t].class_ids;
      differs = differs || a[t].class_ids != c[t].class_ids;
    }
    CHECK(same);
    CHECK(differs);
  }

  TEST_CASE("invalid task counts") {
    CHECK_THROWS_AS(split_into_tasks(names(4), 0, 1), ConfigError);
    CHECK_THROWS_AS(split_into_tasks(names(4), 5, 1), ConfigError);
  }

  TEST_CASE("prompt parameter count") {
    Dims d;
    d.prompts_per_task = 2;
    d.spatial_prompt_len = 5;
    d.temporal_prompt_len = 4;
    d.input_width = 10;
    d.model_width = 6;
    CHECK(prompt_param_count(d) == 2 * 5 * 10 + 2 * 4 * 6);
  }
}

TEST_SUITE("replay memory") {
  TEST_CASE("budget and balance hold after every task") {
    Rng rng(5);
    for (int budget : {7, 12, 40}) {
      ReplayMemory mem(budget);
      Rng pick(budget);
      ClassId next = 0;
      for (int task = 0; task < 6; ++task) {
        std::map<ClassId, std::vector<VideoSample>> cands;
        for (int k = 0; k < 2; ++k, ++next) {
          for (int i = 0; i < 10; ++i) cands[next].push_back(cached_sample(next, i));
        }
        mem.add_task(cands, rng, true);
        CHECK(mem.size() <= std::size_t(budget));
        std::size_t lo = SIZE_MAX, hi = 0;
        for (ClassId c : mem.class_order()) {
          lo = std::min(lo, mem.count(c));
          hi = std::max(hi, mem.count(c));
        }
        CHECK(hi - lo <= 1);
      }
    }
  }

  TEST_CASE("remainder slots go to the earliest classes") {
    ReplayMemory mem(10);
    const auto alloc = mem.allocation(3);
    CHECK(alloc == std::vector<int>{4, 3, 3});
  }

  TEST_CASE("stored samples are drawn from the candidates") {
    Rng rng(1);
    ReplayMemory mem(4);
    std::map<ClassId, std::vector<VideoSample>> cands;
    for (int i = 0; i < 5; ++i) cands[3].push_back(cached_sample(3, i));
    for (int i = 0; i < 5; ++i) cands[8].push_back(cached_sample(8, 10 + i));
    mem.add_task(cands, rng);
    CHECK(mem.count(3) == 2);
    CHECK(mem.count(8) == 2);
    for (const VideoSample* s : mem.samples()) {
      CHECK(s->is_cached());
      CHECK((s->label == 3 || s->label == 8));
    }
  }

  TEST_CASE("budget below the class count") {
    Rng rng(1);
    ReplayMemory mem(1);
    std::map<ClassId, std::vector<VideoSample>> cands;
    cands[0].push_back(cached_sample(0, 0));
    cands[1].push_back(cached_sample(1, 0));
    CHECK_THROWS_AS(mem.add_task(cands, rng), ConfigError);
  }

  TEST_CASE("classes cannot be added twice") {
    Rng rng(1);
    ReplayMemory mem(4);
    std::map<ClassId, std::vector<VideoSample>> cands;
    cands[0].push_back(cached_sample(0, 0));
    mem.add_task(cands, rng);
    CHECK_THROWS_AS(mem.add_task(cands, rng), ContractError);
  }
}

TEST_SUITE("config") {
  TEST_CASE("parse, set and format round trip") {
    const auto cfg = parse_config("# comment\nvariant = zero_shot\nseed = 42\n\nlearning_rate = 0.5\n");
    CHECK(cfg.variant == Variant::zero_shot);
    CHECK(cfg.seed == 42);
    CHECK(cfg.optimizer.learning_rate == 0.5);
    const auto again = parse_config(format_config(cfg));
    CHECK(again.to_map() == cfg.to_map());
  }

  TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("variant = bogus\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  }

  TEST_CASE("validation") {
    auto cfg = ExperimentConfig::synthetic_benchmark();
    CHECK_NOTHROW(cfg.validate());
    cfg.text_template = "no placeholder";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig::synthetic_benchmark();
    cfg.dataset = "cache";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig::synthetic_benchmark();
    cfg.temporal_heads = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("benchmark shape") {
    const auto cfg = ExperimentConfig::synthetic_benchmark();
    CHECK(cfg.n_tasks == 5);
    CHECK(cfg.synthetic.num_classes == 20);
    CHECK(cfg.dims.input_width == 32);
    CHECK(cfg.dims.model_width == 32);
    CHECK(cfg.dims.tokens == 8);
    CHECK(cfg.dims.frames == 8);
    CHECK(cfg.synthetic.train_per_class == 50);
    CHECK(cfg.synthetic.eval_per_class == 10);
    CHECK(cfg.synthetic.sigma_fraction == 0.5);
  }

  TEST_CASE("variant names") {
    for (Variant v : {Variant::zero_shot, Variant::spatial_prompting_linear, Variant::memory_linear,
                      Variant::memory_mcl, Variant::temporal_mcl, Variant::pivot,
                      Variant::pivot_no_prompts}) {
      CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK_THROWS_AS(parse_variant("l2p"), ConfigError);
  }
}

TEST_SUITE("text bank") {
  TEST_CASE("append-only rows and lookups") {
    Rng rng(2);
    TextClassBank bank(4, "{label}");
    const std::vector<ClassId> a = {3, 1};
    bank.append(a, random_unit_rows(rng, 2, 4));
    CHECK(bank.size() == 2);
    CHECK(bank.row_of(1) == 1);
    CHECK(bank.contains(3));
    CHECK_FALSE(bank.contains(0));
    CHECK_THROWS_AS(bank.row_of(0), ContractError);
    CHECK_THROWS_AS(bank.append(a, random_unit_rows(rng, 2, 4)), ContractError);
    const std::vector<ClassId> b = {7};
    CHECK_THROWS_AS(bank.append(b, Matrix::Ones(1, 4)), ContractError);
    CHECK_THROWS_AS(bank.append(b, random_unit_rows(rng, 1, 5)), ContractError);
  }

  TEST_CASE("restricted bank keeps the listed order") {
    Rng rng(2);
    TextClassBank bank(4, "{label}");
    const std::vector<ClassId> ids = {0, 1, 2};
    const Matrix rows = random_unit_rows(rng, 3, 4);
    bank.append(ids, rows);
    const std::vector<ClassId> pick = {2, 0};
    const auto r = bank.restricted(pick);
    CHECK(r.class_ids() == pick);
    CHECK(bit_equal(r.embeddings().row(0), rows.row(2)));
  }

  TEST_CASE("template rendering") {
    CHECK(render_template("a video of a person {label}.", "running") ==
          "a video of a person running.");
    CHECK(render_template("{label} / {label}", "x") == "x / x");
  }
}

TEST_SUITE("accuracy matrix") {
  TEST_CASE("lower-triangular contract") {
    AccuracyMatrix m(3);
    m.set(1, 0, 0.5);
    CHECK(m.defined(1, 0));
    CHECK_FALSE(m.defined(1, 1));
    CHECK_THROWS_AS(m.at(1, 1), ContractError);
    CHECK_THROWS_AS(m.set(0, 1, 0.5), ContractError);
    CHECK_THROWS_AS(m.set(0, 0, 1.5), ContractError);
    CHECK(m.row_length(1) == 1);
  }

  TEST_CASE("CSV round trip") {
    Rng rng(3);
    AccuracyMatrix m(6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j <= i; ++j) m.set(i, j, double(uniform_index(rng, 41)) / 40.0);
    const auto back = AccuracyMatrix::from_csv(m.to_csv());
    REQUIRE(back.size() == 6);
    for (int i = 0; i < 6; ++i) {
      CHECK(back.row_length(i) == i + 1);
      for (int j = 0; j <= i; ++j) CHECK(back.at(i, j) == m.at(i, j));
    }
    CHECK(back.to_csv() == m.to_csv());
    CHECK_THROWS_AS(AccuracyMatrix::from_csv("task,1\n"), InputError);
  }
}

TEST_SUITE("serialization") {
  TEST_CASE("tensor archive round trip") {
    TempDir dir("archive");
    Rng rng(4);
    TensorArchive a;
    a.header["kind"] = "test";
    Matrix m = random_matrix(rng, 3, 5);
    round_to_float32(m);
    a.tensors.push_back({"w", m});
    a.tensors.push_back({"empty", Matrix(0, 4)});
    const std::string path = (dir.path() / "a.vclt").string();
    write_tensor_archive(path, a);
    const auto b = read_tensor_archive(path);
    CHECK(b.header["kind"] == "test");
    CHECK(bit_equal(b.get("w"), m));
    CHECK(b.get("empty").cols() == 4);
    CHECK_FALSE(b.contains("missing"));
  }

  TEST_CASE("truncated archives are rejected") {
    TempDir dir("trunc");
    TensorArchive a;
    a.tensors.push_back({"w", Matrix::Ones(4, 4)});
    const std::string path = (dir.path() / "a.vclt").string();
    write_tensor_archive(path, a);
    std::string bytes = read_file(path);
    write_file(path, bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS(read_tensor_archive(path));
  }

  TEST_CASE("parameter loading checks names and shapes") {
    TensorArchive a;
    a.tensors.push_back({"p", Matrix::Ones(2, 2)});
    Parameter p("p", Matrix::Zero(2, 2));
    Parameter* ps[] = {&p};
    load_parameters(a, ps);
    CHECK(p.value(1, 1) == 1.0);
    Parameter q("q", Matrix::Zero(2, 2));
    Parameter* qs[] = {&q};
    CHECK_THROWS_AS(load_parameters(a, qs), ContractError);
    Parameter wrong("p", Matrix::Zero(3, 2));
    Parameter* ws[] = {&wrong};
    CHECK_THROWS_AS(load_parameters(a, ws), ContractError);
  }

  TEST_CASE("dims and task specs") {
    Dims d;
    d.frames = 3;
    d.spatial_prompt_len = 7;
    const Dims e = dims_from_json(to_json(d));
    CHECK(e.frames == 3);
    CHECK(e.spatial_prompt_len == 7);
    TaskSpec t;
    t.task_index = 4;
    t.class_ids = {1, 9};
    t.class_names = {"b", "j"};
    const TaskSpec u = task_from_json(to_json(t));
    CHECK(u.task_index == 4);
    CHECK(u.class_ids == t.class_ids);
    CHECK(u.class_names == t.class_names);
  }

  TEST_CASE("sha256 known answer") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}
