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

#include "vcl/core/errors.hpp"
#include "vcl/core/tasks.hpp"
#include "vcl/core/serialize.hpp"
#include "vcl/method/forward.hpp"
#include "vcl/method/mcl.hpp"
#include "vcl/encoders/synthetic.hpp"
#include "vcl/method/prompts.hpp"
#include "vcl/temporal/temporal_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace vcl;
using namespace vcl::testing;

namespace {

TemporalOptions small_temporal(int width = 8, bool positional = false) {
  TemporalOptions o;
  o.width = width;
  o.layers = 2;
  o.heads = 2;
  o.positional_embeddings = positional;
  o.max_positions = positional ? 12 : 0;
  o.seed = 4;
  return o;
}

TextClassBank bank_of(Rng& rng, std::vector<ClassId> ids, int width) {
  TextClassBank bank(width, "{label}");
  bank.append(ids, random_unit_rows(rng, Eigen::Index(ids.size()), width));
  return bank;
}

Dims small_dims(int width) {
  Dims d;
  d.frames = 3;
  d.tokens = 4;
  d.input_width = width;
  d.model_width = width;
  return d;
}

TaskSpec task_of(int index, std::vector<ClassId> ids) {
  TaskSpec t;
  t.task_index = index;
  t.class_ids = ids;
  for (ClassId c : ids) t.class_names.push_back("c" + std::to_string(c));
  return t;
}

}  // namespace

TEST_SUITE("temporal encoder") {
  TEST_CASE("parameter count identity across widths") {
    for (int d : {8, 16, 32}) {
      for (int layers : {1, 3}) {
        TemporalOptions o = small_temporal(d);
        o.layers = layers;
        const TemporalEncoder enc(o);
        const std::int64_t f = 4 * d;
        const std::int64_t per = 4 * (d * d + d) + (d * f + f) + (f * d + d) + 4 * d;
        CHECK(enc.count_parameters() == layers * per + d);
      }
    }
    TemporalOptions o = small_temporal(8, true);
    CHECK(TemporalEncoder(o).count_parameters() == TemporalEncoder(small_temporal(8)).count_parameters() + 12 * 8);
  }

  TEST_CASE("seeded initialisation is bit-reproducible") {
    const TemporalEncoder a(small_temporal()), b(small_temporal());
    CHECK(a.digest() == b.digest());
    TemporalOptions o = small_temporal();
    o.seed = 5;
    CHECK(TemporalEncoder(o).digest() != a.digest());
  }

  TEST_CASE("trainable and frozen passes agree") {
    Rng rng(2);
    TemporalEncoder enc(small_temporal(8, true));
    const Matrix frames = random_matrix(rng, 3, 8);
    const Matrix prompts = random_matrix(rng, 2, 8);
    ag::Tape t1, t2;
    const Matrix a = t1.value(enc.forward_class(t1, t1.constant(frames), true));
    const Matrix b = t2.value(std::as_const(enc).forward_class(t2, t2.constant(frames)));
    CHECK(bit_equal(a, b));
    CHECK(bit_equal(enc.temporal_forward_class(frames), a));
    CHECK(enc.temporal_forward_prompted(prompts, frames).cols() == 8);
  }

  TEST_CASE("contract errors") {
    Rng rng(2);
    const TemporalEncoder enc(small_temporal());
    CHECK_THROWS_AS(enc.temporal_forward_class(random_matrix(rng, 3, 6)), InputError);
    CHECK_THROWS_AS(enc.temporal_forward_prompted(Matrix(0, 8), random_matrix(rng, 3, 8)), ContractError);
    TemporalOptions o = small_temporal(8, true);
    o.max_positions = 0;
    CHECK_THROWS_AS(TemporalEncoder{o}, ConfigError);
  }

  TEST_CASE("save and load round trip") {
    TempDir dir("temporal");
    Rng rng(8);
    TemporalEncoder enc(small_temporal(8, true));
    for (Parameter* p : enc.parameters()) {
      p->value += random_matrix(rng, p->value.rows(), p->value.cols(), 0.1);
      round_to_float32(p->value);
    }
    const std::string path = (dir.path() / "t.vclt").string();
    enc.save(path);
    const TemporalEncoder back = TemporalEncoder::load(path);
    CHECK(back.digest() == enc.digest());
    const Matrix frames = random_matrix(rng, 3, 8);
    CHECK(bit_equal(back.temporal_forward_class(frames), enc.temporal_forward_class(frames)));
  }
}

TEST_SUITE("mcl") {
  TEST_CASE("logits are cosine over temperature") {
    Rng rng(3);
    const auto bank = bank_of(rng, {0, 1, 2, 3}, 6);
    const RowVector v = random_matrix(rng, 1, 6).row(0);
    const auto p = mcl_classify(v, bank, 0.05);
    for (int k = 0; k < 4; ++k) {
      const double cos = v.dot(bank.embeddings().row(k)) / v.norm();
      CHECK(p.logits(k) == doctest::Approx(cos / 0.05).epsilon(1e-12));
    }
    Eigen::Index best;
    p.logits.maxCoeff(&best);
    CHECK(p.row == int(best));
    CHECK(p.class_id == bank.class_ids()[best]);
  }

  TEST_CASE("ties go to the lowest class id") {
    TextClassBank bank(2, "{label}");
    const std::vector<ClassId> ids = {5, 2};
    Matrix rows(2, 2);
    rows << 1, 0, 1, 0;
    bank.append(ids, rows);
    CHECK(mcl_classify(RowVector::Unit(2, 0), bank, 0.01).class_id == 2);
  }

  TEST_CASE("appending classes leaves existing logits bit-identical") {
    Rng rng(4);
    TextClassBank bank(8, "{label}");
    const Matrix rows = random_unit_rows(rng, 12, 8);
    const RowVector v = random_matrix(rng, 1, 8).row(0);
    RowVector previous;
    for (int k = 0; k < 12; ++k) {
      const std::vector<ClassId> id = {ClassId(k)};
      bank.append(id, rows.row(k));
      const RowVector logits = mcl_classify(v, bank, 0.01).logits;
      if (k > 0) CHECK(bit_equal(logits.head(k), previous));
      previous = logits;
    }
  }

  TEST_CASE("class logits do not depend on append order") {
    Rng rng(5);
    const Matrix rows = random_unit_rows(rng, 6, 8);
    const RowVector v = random_matrix(rng, 1, 8).row(0);
    std::vector<ClassId> order(6);
    std::iota(order.begin(), order.end(), 0);
    TextClassBank forward(8, "{label}");
    forward.append(order, rows);
    std::vector<ClassId> rev(order.rbegin(), order.rend());
    TextClassBank backward(8, "{label}");
    backward.append(rev, forward.rows_for(rev));
    const auto a = mcl_classify(v, forward, 0.01), b = mcl_classify(v, backward, 0.01);
    for (ClassId c = 0; c < 6; ++c) CHECK(a.logits(forward.row_of(c)) == b.logits(backward.row_of(c)));
    CHECK(a.class_id == b.class_id);
  }

  TEST_CASE("loss matches a direct computation") {
    Rng rng(6);
    const auto bank = bank_of(rng, {0, 1, 2}, 5);
    const Matrix emb = random_matrix(rng, 4, 5);
    const std::vector<ClassId> labels = {0, 2, 1, 2};
    double expected = 0.0;
    for (int i = 0; i < 4; ++i) {
      const RowVector v = emb.row(i) / emb.row(i).norm();
      const RowVector z = (v * bank.embeddings().transpose()) / 0.1;
      expected += std::log(z.array().exp().sum()) - z(labels[std::size_t(i)]);
    }
    CHECK(mcl_loss(emb, labels, bank, 0.1) == doctest::Approx(expected / 4).epsilon(1e-10));
  }

  TEST_CASE("errors") {
    Rng rng(7);
    const TextClassBank empty(4, "{label}");
    CHECK_THROWS_AS(mcl_classify(RowVector::Ones(4), empty, 0.01), ClassificationError);
    const auto bank = bank_of(rng, {0, 1}, 4);
    CHECK_THROWS_AS(mcl_classify(RowVector::Zero(4), bank, 0.01), ClassificationError);
    RowVector nan = RowVector::Ones(4);
    nan(1) = std::nan("");
    CHECK_THROWS_AS(mcl_classify(nan, bank, 0.01), ClassificationError);
    ag::Tape t;
    CHECK_THROWS_AS(mcl_sample_loss(t, t.constant(RowVector::Ones(4)), 9, bank, 0.01), ContractError);
  }
}

TEST_SUITE("prompts") {
  TEST_CASE("initialisation shapes, keys and seeding") {
    Rng rng(1);
    const Dims d = small_dims(6);
    const Matrix keys = random_unit_rows(rng, 2, 6);
    const PromptSet a = init_prompt_set(task_of(1, {4, 7}), d, keys, 3);
    CHECK(a.spatial.value.rows() == d.spatial_prompt_rows());
    CHECK(a.spatial.value.cols() == 6);
    CHECK(a.temporal.value.rows() == d.temporal_prompt_rows());
    CHECK(a.parameter_count() == prompt_param_count(d));
    CHECK(a.spatial.value.cwiseAbs().maxCoeff() <= 0.04);
    CHECK(a.key_classes == std::vector<ClassId>{4, 7});
    CHECK(init_prompt_set(task_of(1, {4, 7}), d, keys, 3).digest() == a.digest());
    CHECK(init_prompt_set(task_of(2, {4, 7}), d, keys, 3).digest() != a.digest());
    CHECK_THROWS_AS(init_prompt_set(task_of(1, {4}), d, keys, 3), ContractError);
    CHECK_THROWS_AS(init_prompt_set(task_of(1, {4, 7}), d, 2.0 * keys, 3), ContractError);
  }

  TEST_CASE("pool is append-only with frozen predecessors") {
    Rng rng(2);
    const Dims d = small_dims(6);
    PromptPool pool;
    pool.append(init_prompt_set(task_of(1, {0}), d, random_unit_rows(rng, 1, 6), 1));
    CHECK_THROWS_AS(pool.append(init_prompt_set(task_of(2, {1}), d, random_unit_rows(rng, 1, 6), 1)),
                    ContractError);
    pool.freeze_last();
    CHECK_THROWS_AS(pool.append(init_prompt_set(task_of(1, {1}), d, random_unit_rows(rng, 1, 6), 1)),
                    ContractError);
    pool.append(init_prompt_set(task_of(2, {1}), d, random_unit_rows(rng, 1, 6), 1));
    CHECK(pool.size() == 2);
    CHECK(pool.digests().size() == 2);
  }

  TEST_CASE("pool save and load") {
    TempDir dir("pool");
    Rng rng(3);
    const Dims d = small_dims(6);
    PromptPool pool;
    for (int t = 1; t <= 3; ++t) {
      Matrix keys = random_unit_rows(rng, 2, 6);
      round_to_float32(keys);
      PromptSet s = init_prompt_set(task_of(t, {2 * t, 2 * t + 1}), d, keys, 9);
      round_to_float32(s.spatial.value);
      round_to_float32(s.temporal.value);
      pool.append(std::move(s));
      pool.freeze_last();
    }
    pool.save(dir.str());
    const PromptPool back = PromptPool::load(dir.str());
    CHECK(back.digests() == pool.digests());
    CHECK(back.at(2).frozen);
    CHECK(back.at(1).key_classes == pool.at(1).key_classes);
  }

  TEST_CASE("selection is invariant to positive query scaling") {
    Rng rng(4);
    const Dims d = small_dims(10);
    PromptPool pool;
    for (int t = 1; t <= 5; ++t) {
      pool.append(init_prompt_set(task_of(t, {3 * t, 3 * t + 1, 3 * t + 2}), d,
                                  random_unit_rows(rng, 3, 10), 1));
      pool.freeze_last();
    }
    for (int i = 0; i < 300; ++i) {
      const RowVector q = random_matrix(rng, 1, 10).row(0);
      const std::size_t base = select_prompt_index(q, pool);
      for (double s : {1e-6, 0.3, 7.0, 1e6}) CHECK(select_prompt_index(s * q, pool) == base);
    }
  }

  TEST_CASE("selection errors") {
    Rng rng(5);
    const PromptPool empty;
    CHECK_THROWS_AS(select_prompt_index(RowVector::Ones(4), empty), SelectionError);
    PromptPool pool;
    pool.append(init_prompt_set(task_of(1, {0}), small_dims(4), random_unit_rows(rng, 1, 4), 1));
    CHECK_THROWS_AS(select_prompt_index(RowVector::Zero(4), pool), SelectionError);
  }
}

TEST_SUITE("forward") {
  TEST_CASE("prompted and unprompted paths agree for absorbed prompts") {
    // With no temporal layers the class-token path returns the class token
    // and the prompted path returns the mean of the temporal prompts.
    Rng rng(6);
    TemporalOptions o = small_temporal(6);
    o.layers = 0;
    const TemporalEncoder enc(o);
    const Matrix frames = random_matrix(rng, 3, 6);
    const Matrix prompts = enc.class_token().value.replicate(3, 1);
    CHECK(enc.temporal_forward_class(frames).isApprox(enc.temporal_forward_prompted(prompts, frames), 1e-12));
  }

  TEST_CASE("prompted frame features pool the prompt positions") {
    Rng rng(7);
    SyntheticOptions so;
    so.num_classes = 3;
    so.tokens = 4;
    so.input_width = 6;
    so.model_width = 6;
    so.foreground_patches = 1;
    const SyntheticEncoderSuite suite(so);
    const auto sample = encode_sample(suite.make_sample(0, 2, 1), suite.spatial());
    const Matrix prompts = random_matrix(rng, 2, 6, 0.1);
    ag::Tape t;
    const Matrix pooled = t.value(prompted_frame_features(t, sample.tokens, t.constant(prompts), suite.spatial()));
    REQUIRE(pooled.rows() == 2);
    for (int f = 0; f < 2; ++f) {
      Matrix seq(prompts.rows() + sample.tokens[f].rows(), 6);
      seq << prompts, sample.tokens[f];
      const Matrix out = suite.spatial().run_attention_stack(seq);
      CHECK((pooled.row(f) - out.topRows(2).colwise().mean()).norm() < 1e-12);
    }
  }

  TEST_CASE("cached and raw samples give identical predictions") {
    SyntheticOptions so;
    so.num_classes = 4;
    so.tokens = 4;
    so.input_width = 8;
    so.model_width = 8;
    so.foreground_patches = 1;
    const SyntheticEncoderSuite suite(so);
    const auto bank = encode_text(suite.text(), suite.class_names(), so.text_template);
    const TemporalEncoder enc(small_temporal(8));
    for (int c = 0; c < 4; ++c) {
      const VideoSample raw = suite.make_sample(c, 3, 10 + c);
      const EncodedSample e = encode_sample(raw, suite.spatial());
      const VideoSample cached = to_video_sample(e);
      const auto a = forward_unprompted(raw, suite.spatial(), enc, bank, 0.01);
      const auto b = forward_unprompted(cached, suite.spatial(), enc, bank, 0.01);
      CHECK(a.class_id == b.class_id);
      CHECK((a.embedding - b.embedding).norm() <= 1e-5 * a.embedding.norm());
    }
  }
}
