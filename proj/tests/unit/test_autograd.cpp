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

#include "vcl/core/autograd.hpp"
#include "vcl/core/transformer.hpp"

#include <functional>

using namespace vcl;
using namespace vcl::testing;

namespace {

using Builder = std::function<ag::Var(ag::Tape&, std::vector<ag::Var>&)>;

// Reduces any output to a scalar through a fixed random weighting.
ag::Var weighted_sum(ag::Tape& t, ag::Var x, const Matrix& w) {
  const Matrix& v = t.value(x);
  const ag::Var ones_l = t.constant(Matrix::Ones(1, v.rows()));
  const ag::Var ones_r = t.constant(Matrix::Ones(1, v.cols()));
  return t.matmul_bt(t.matmul(ones_l, t.mul(x, t.constant(w))), ones_r);
}

double max_relative_error(const std::vector<Matrix>& inputs, const Builder& build) {
  Rng rng(99);
  Matrix w;
  {
    ag::Tape t;
    std::vector<ag::Var> vars;
    for (const auto& m : inputs) vars.push_back(t.constant(m));
    const Matrix& out = t.value(build(t, vars));
    w = random_matrix(rng, out.rows(), out.cols());
  }
  auto eval = [&](const std::vector<Matrix>& in) {
    ag::Tape t;
    std::vector<ag::Var> vars;
    for (const auto& m : in) vars.push_back(t.constant(m));
    return t.scalar(weighted_sum(t, build(t, vars), w));
  };

  ag::Tape t;
  std::vector<ag::Var> vars;
  for (const auto& m : inputs) vars.push_back(t.input(m));
  t.backward(weighted_sum(t, build(t, vars), w));

  double worst = 0.0;
  const double eps = 1e-6;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Matrix analytic = t.grad(vars[k]);
    for (Eigen::Index i = 0; i < inputs[k].size(); ++i) {
      auto up = inputs, down = inputs;
      up[k].data()[i] += eps;
      down[k].data()[i] -= eps;
      const double numeric = (eval(up) - eval(down)) / (2 * eps);
      const double a = analytic.data()[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-4}));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("autograd") {
  TEST_CASE("primitive gradients match central differences") {
    Rng rng(1);
    const Matrix a = random_matrix(rng, 3, 4), b = random_matrix(rng, 4, 5), c = random_matrix(rng, 3, 4);
    const Matrix row = random_matrix(rng, 1, 4);

    SUBCASE("matmul") {
      CHECK(max_relative_error({a, b}, [](auto& t, auto& v) { return t.matmul(v[0], v[1]); }) < 1e-6);
    }
    SUBCASE("matmul_bt") {
      CHECK(max_relative_error({a, c}, [](auto& t, auto& v) { return t.matmul_bt(v[0], v[1]); }) < 1e-6);
    }
    SUBCASE("add, mul, scale") {
      CHECK(max_relative_error({a, c}, [](auto& t, auto& v) {
              return t.scale(t.add(t.mul(v[0], v[1]), v[0]), -1.7);
            }) < 1e-6);
    }
    SUBCASE("add_row") {
      CHECK(max_relative_error({a, row}, [](auto& t, auto& v) { return t.add_row(v[0], v[1]); }) < 1e-6);
    }
    SUBCASE("gelu") {
      CHECK(max_relative_error({a}, [](auto& t, auto& v) { return t.gelu(v[0]); }) < 1e-6);
    }
    SUBCASE("layer_norm") {
      const Matrix g = random_matrix(rng, 1, 4), be = random_matrix(rng, 1, 4);
      CHECK(max_relative_error({a, g, be}, [](auto& t, auto& v) {
              return t.layer_norm(v[0], v[1], v[2]);
            }) < 1e-5);
    }
    SUBCASE("softmax_rows") {
      CHECK(max_relative_error({a}, [](auto& t, auto& v) { return t.softmax_rows(v[0]); }) < 1e-6);
    }
    SUBCASE("slices and concatenation") {
      CHECK(max_relative_error({a, c}, [](auto& t, auto& v) {
              const ag::Var parts[] = {t.slice_rows(v[0], 1, 2), v[1]};
              const ag::Var cat = t.concat_rows(parts);
              const ag::Var cols[] = {t.slice_cols(cat, 0, 2), cat};
              return t.concat_cols(cols);
            }) < 1e-6);
    }
    SUBCASE("mean_rows and normalize_rows") {
      CHECK(max_relative_error({a}, [](auto& t, auto& v) {
              return t.normalize_rows(t.add(v[0], t.constant(Matrix::Constant(3, 4, 0.1))));
            }) < 1e-5);
      CHECK(max_relative_error({a}, [](auto& t, auto& v) { return t.mean_rows(v[0]); }) < 1e-6);
    }
    SUBCASE("cross_entropy") {
      const Matrix logits = random_matrix(rng, 1, 6, 3.0);
      CHECK(max_relative_error({logits}, [](auto& t, auto& v) { return t.cross_entropy(v[0], 2); }) < 1e-6);
    }
  }

  TEST_CASE("transformer block gradients w.r.t. input and parameters") {
    Rng rng(7);
    TransformerBlock block = TransformerBlock::create("b", 8, 2, 16, rng, 0.3);
    const Matrix x = random_matrix(rng, 5, 8);
    CHECK(max_relative_error({x}, [&](auto& t, auto& v) { return block.forward_frozen(t, v[0]); }) < 1e-5);

    const Matrix w = random_matrix(rng, 5, 8);
    auto loss = [&] {
      ag::Tape t;
      return t.scalar(weighted_sum(t, block.forward_frozen(t, t.constant(x)), w));
    };
    for (Parameter* p : block.parameters()) p->zero_grad();
    {
      ag::Tape t;
      t.backward(weighted_sum(t, block.forward(t, t.constant(x)), w));
    }
    double worst = 0.0;
    for (Parameter* p : block.parameters()) {
      for (Eigen::Index i = 0; i < p->value.size(); ++i) {
        double& v = p->value.data()[i];
        const double saved = v;
        v = saved + 1e-6;
        const double up = loss();
        v = saved - 1e-6;
        const double down = loss();
        v = saved;
        const double n = (up - down) / 2e-6, a = p->grad.data()[i];
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4}));
      }
    }
    CHECK(worst < 1e-5);
  }

  TEST_CASE("parameter used twice accumulates both contributions") {
    Parameter p("p", Matrix::Constant(1, 1, 3.0));
    ag::Tape t;
    const ag::Var a = t.parameter(p);
    const ag::Var b = t.parameter(p);
    t.backward(t.mul(a, b));
    CHECK(p.grad(0, 0) == doctest::Approx(6.0));
  }

  TEST_CASE("frozen parameters receive no gradient") {
    Parameter p("p", Matrix::Constant(2, 2, 1.0));
    ag::Tape t;
    const ag::Var x = t.input(Matrix::Ones(2, 2));
    const ag::Var y = t.mul(x, t.frozen(p));
    t.backward(t.matmul_bt(t.mean_rows(y), t.constant(Matrix::Ones(1, 2))));
    CHECK(p.grad.isZero());
    CHECK_FALSE(t.grad(x).isZero());
  }

  TEST_CASE("block parameter count identity") {
    Rng rng(1);
    const int d = 12, f = 40;
    auto block = TransformerBlock::create("b", d, 3, f, rng);
    std::int64_t n = 0;
    for (const Parameter* p : std::as_const(block).parameters()) n += p->size();
    CHECK(n == 4 * (d * d + d) + (d * f + f) + (f * d + d) + 4 * d);
  }
}
