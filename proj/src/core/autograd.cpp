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

#include "vcl/core/autograd.hpp"

#include "vcl/core/errors.hpp"

#include <cmath>
#include <numbers>

namespace vcl::ag {

namespace {

void check_same(const Matrix& a, const Matrix& b, const char* op) {
  if (!same_shape(a, b)) {
    throw ContractError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                        shape_string(b));
  }
}

}  // namespace

Var Tape::push(Matrix value, bool requires_grad, std::function<void(Tape&, int)> bw) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(bw);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant(Matrix m) { return push(std::move(m), false, nullptr); }

Var Tape::constant_ref(const Matrix& m) {
  Node n;
  n.ref = &m;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::input(Matrix m) {
  Node n;
  n.value = std::move(m);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.ref = &p.value;
  n.sink = &p.grad;
  n.requires_grad = true;
  if (!same_shape(p.grad, p.value)) p.zero_grad();
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Matrix& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.ref ? *n.ref : n.value;
}

const Matrix& Tape::grad(Var v) const { return node(v).grad; }

void Tape::accumulate(Var v, const Matrix& g) { accumulate_expr(v, g); }

template <typename Expr>
void Tape::accumulate_expr(Var v, const Expr& g) {
  Node& n = node(v);
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

Var Tape::matmul(Var a, Var b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.cols() != vb.rows()) {
    throw ContractError("matmul: inner dimension mismatch " + shape_string(va) + " * " +
                        shape_string(vb));
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  return push(va * vb, rg, [a, b](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.requires_grad(a)) t.accumulate_expr(a, g * t.value(b).transpose());
    if (t.requires_grad(b)) t.accumulate_expr(b, t.value(a).transpose() * g);
  });
}

Var Tape::matmul_bt(Var a, Var b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.cols() != vb.cols()) {
    throw ContractError("matmul_bt: width mismatch " + shape_string(va) + " vs " +
                        shape_string(vb));
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  return push(va * vb.transpose(), rg, [a, b](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.requires_grad(a)) t.accumulate_expr(a, g * t.value(b));
    if (t.requires_grad(b)) t.accumulate_expr(b, g.transpose() * t.value(a));
  });
}

Var Tape::add(Var a, Var b) {
  check_same(value(a), value(b), "add");
  const bool rg = requires_grad(a) || requires_grad(b);
  return push(value(a) + value(b), rg, [a, b](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::mul(Var a, Var b) {
  check_same(value(a), value(b), "mul");
  const bool rg = requires_grad(a) || requires_grad(b);
  return push(value(a).cwiseProduct(value(b)), rg, [a, b](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.requires_grad(a)) t.accumulate_expr(a, g.cwiseProduct(t.value(b)));
    if (t.requires_grad(b)) t.accumulate_expr(b, g.cwiseProduct(t.value(a)));
  });
}

Var Tape::add_row(Var x, Var row) {
  const Matrix& vx = value(x);
  const Matrix& vr = value(row);
  if (vr.rows() != 1 || vr.cols() != vx.cols()) {
    throw ContractError("add_row: expected 1x" + std::to_string(vx.cols()) + " row, got " +
                        shape_string(vr));
  }
  Matrix out = vx.rowwise() + vr.row(0);
  const bool rg = requires_grad(x) || requires_grad(row);
  return push(std::move(out), rg, [x, row](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate(x, g);
    if (t.requires_grad(row)) t.accumulate_expr(row, g.colwise().sum());
  });
}

Var Tape::scale(Var x, double s) {
  return push(value(x) * s, requires_grad(x), [x, s](Tape& t, int self) {
    t.accumulate_expr(x, t.nodes_[self].grad * s);
  });
}

Var Tape::gelu(Var x) {
  const Matrix& vx = value(x);
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  Matrix out = vx.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::erf(v * inv_sqrt2)); });
  return push(std::move(out), requires_grad(x), [x](Tape& t, int self) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    const Matrix& vx = t.value(x);
    Matrix d = vx.unaryExpr([](double v) {
      const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
      return cdf + v * pdf;
    });
    t.accumulate_expr(x, t.nodes_[self].grad.cwiseProduct(d));
  });
}

Var Tape::layer_norm(Var x, Var gamma, Var beta, double eps) {
  const Matrix& vx = value(x);
  const Matrix& vg = value(gamma);
  const Matrix& vb = value(beta);
  const Eigen::Index n = vx.cols();
  if (vg.rows() != 1 || vg.cols() != n || !same_shape(vg, vb)) {
    throw ContractError("layer_norm: affine parameters must be 1x" + std::to_string(n));
  }
  Matrix xhat(vx.rows(), n);
  Eigen::VectorXd inv_std(vx.rows());
  for (Eigen::Index r = 0; r < vx.rows(); ++r) {
    const double mean = vx.row(r).mean();
    const double var = (vx.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (vx.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * vg.row(0).array()).rowwise() + vb.row(0).array();
  const bool rg = requires_grad(x) || requires_grad(gamma) || requires_grad(beta);
  return push(std::move(out), rg,
              [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t,
                                                                                     int self) {
                const Matrix& g = t.nodes_[self].grad;
                if (t.requires_grad(gamma)) {
                  t.accumulate_expr(gamma, g.cwiseProduct(xhat).colwise().sum());
                }
                if (t.requires_grad(beta)) t.accumulate_expr(beta, g.colwise().sum());
                if (t.requires_grad(x)) {
                  const Matrix& vg = t.value(gamma);
                  Matrix dxhat = g.array().rowwise() * vg.row(0).array();
                  Matrix dx(dxhat.rows(), dxhat.cols());
                  for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
                    const double m1 = dxhat.row(r).mean();
                    const double m2 = dxhat.row(r).dot(xhat.row(r)) / double(dxhat.cols());
                    dx.row(r) =
                        (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2) * inv_std(r);
                  }
                  t.accumulate(x, dx);
                }
              });
}

Var Tape::softmax_rows(Var x) {
  const Matrix& vx = value(x);
  Matrix out(vx.rows(), vx.cols());
  for (Eigen::Index r = 0; r < vx.rows(); ++r) {
    const double mx = vx.row(r).maxCoeff();
    out.row(r) = (vx.row(r).array() - mx).exp();
    out.row(r) /= out.row(r).sum();
  }
  return push(std::move(out), requires_grad(x), [x](Tape& t, int self) {
    const Matrix& y = t.nodes_[self].value;
    const Matrix& g = t.nodes_[self].grad;
    Matrix dx(y.rows(), y.cols());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double dot = g.row(r).dot(y.row(r));
      dx.row(r) = y.row(r).array() * (g.row(r).array() - dot);
    }
    t.accumulate(x, dx);
  });
}

Var Tape::slice_rows(Var x, Eigen::Index start, Eigen::Index count) {
  const Matrix& vx = value(x);
  if (start < 0 || count < 0 || start + count > vx.rows()) {
    throw ContractError("slice_rows: range out of bounds for " + shape_string(vx));
  }
  return push(vx.middleRows(start, count), requires_grad(x), [x, start, count](Tape& t, int self) {
    Node& nx = t.nodes_[x.id];
    const Matrix& vx = t.value(x);
    if (nx.grad.size() == 0) nx.grad = Matrix::Zero(vx.rows(), vx.cols());
    nx.grad.middleRows(start, count) += t.nodes_[self].grad;
  });
}

Var Tape::slice_cols(Var x, Eigen::Index start, Eigen::Index count) {
  const Matrix& vx = value(x);
  if (start < 0 || count < 0 || start + count > vx.cols()) {
    throw ContractError("slice_cols: range out of bounds for " + shape_string(vx));
  }
  return push(vx.middleCols(start, count), requires_grad(x), [x, start, count](Tape& t, int self) {
    Node& nx = t.nodes_[x.id];
    const Matrix& vx = t.value(x);
    if (nx.grad.size() == 0) nx.grad = Matrix::Zero(vx.rows(), vx.cols());
    nx.grad.middleCols(start, count) += t.nodes_[self].grad;
  });
}

Var Tape::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts[0]).cols();
  bool rg = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw ContractError("concat_rows: width mismatch");
    rows += value(p).rows();
    rg = rg || requires_grad(p);
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    out.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  std::vector<Var> saved(parts.begin(), parts.end());
  return push(std::move(out), rg, [saved = std::move(saved)](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    Eigen::Index r = 0;
    for (Var p : saved) {
      const Eigen::Index n = t.value(p).rows();
      if (t.requires_grad(p)) t.accumulate_expr(p, g.middleRows(r, n));
      r += n;
    }
  });
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  Eigen::Index cols = 0;
  const Eigen::Index rows = value(parts[0]).rows();
  bool rg = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw ContractError("concat_cols: height mismatch");
    cols += value(p).cols();
    rg = rg || requires_grad(p);
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    out.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  std::vector<Var> saved(parts.begin(), parts.end());
  return push(std::move(out), rg, [saved = std::move(saved)](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    Eigen::Index c = 0;
    for (Var p : saved) {
      const Eigen::Index n = t.value(p).cols();
      if (t.requires_grad(p)) t.accumulate_expr(p, g.middleCols(c, n));
      c += n;
    }
  });
}

Var Tape::mean_rows(Var x) {
  const Matrix& vx = value(x);
  if (vx.rows() == 0) throw ContractError("mean_rows: empty input");
  return push(vx.colwise().mean(), requires_grad(x), [x](Tape& t, int self) {
    const Matrix& vx = t.value(x);
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate_expr(x, g.replicate(vx.rows(), 1) / double(vx.rows()));
  });
}

Var Tape::normalize_rows(Var x, double eps) {
  const Matrix& vx = value(x);
  Eigen::VectorXd norms = vx.rowwise().norm();
  Matrix out(vx.rows(), vx.cols());
  for (Eigen::Index r = 0; r < vx.rows(); ++r) {
    out.row(r) = vx.row(r) / std::max(norms(r), eps);
  }
  return push(std::move(out), requires_grad(x),
              [x, norms = std::move(norms), eps](Tape& t, int self) {
                const Matrix& y = t.nodes_[self].value;
                const Matrix& g = t.nodes_[self].grad;
                Matrix dx(y.rows(), y.cols());
                for (Eigen::Index r = 0; r < y.rows(); ++r) {
                  const double dot = g.row(r).dot(y.row(r));
                  dx.row(r) = (g.row(r) - y.row(r) * dot) / std::max(norms(r), eps);
                }
                t.accumulate(x, dx);
              });
}

Var Tape::cross_entropy(Var logits, Eigen::Index target) {
  const Matrix& z = value(logits);
  if (z.rows() != 1 || target < 0 || target >= z.cols()) {
    throw ContractError("cross_entropy: expected a 1xM logits row and a valid target");
  }
  const double mx = z.maxCoeff();
  RowVector p = (z.row(0).array() - mx).exp();
  const double denom = p.sum();
  p /= denom;
  const double loss = -(z(0, target) - mx - std::log(denom));
  Matrix out(1, 1);
  out(0, 0) = loss;
  return push(std::move(out), requires_grad(logits),
              [logits, target, p = std::move(p)](Tape& t, int self) {
                const double g = t.nodes_[self].grad(0, 0);
                Matrix dz = p * g;
                dz(0, target) -= g;
                t.accumulate(logits, dz);
              });
}

void Tape::backward(Var root, double seed) {
  Node& r = node(root);
  if (!r.requires_grad) return;
  const Matrix& rv = value(root);
  r.grad = Matrix::Constant(rv.rows(), rv.cols(), seed);
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.sink) *n.sink += n.grad;
  }
}

}  // namespace vcl::ag
