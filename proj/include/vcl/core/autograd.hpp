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

#include "vcl/core/tensor.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vcl {

/// A named trainable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)) {
    grad = Matrix::Zero(value.rows(), value.cols());
  }

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  Eigen::Index size() const { return value.size(); }
};

namespace ag {

/// Handle to a node recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode automatic differentiation over dense matrices.
///
/// Every operation appends a node; backward() walks the nodes in reverse
/// creation order. Nodes whose inputs carry no gradient are evaluated but
/// never differentiated, so frozen sub-networks cost only their forward pass.
/// Parameter leaves reference the parameter's storage and add their gradient
/// into Parameter::grad when backward() runs.
class Tape {
 public:
  Tape() { nodes_.reserve(256); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix m);
  /// Leaf referencing external storage; `m` must outlive the tape.
  Var constant_ref(const Matrix& m);
  /// Leaf that records its own gradient (read back with grad()).
  Var input(Matrix m);
  Var parameter(Parameter& p);
  /// Parameter used as a constant (frozen): no gradient is accumulated.
  Var frozen(const Parameter& p) { return constant_ref(p.value); }

  const Matrix& value(Var v) const;
  const Matrix& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  double scalar(Var v) const { return value(v)(0, 0); }
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  /// a * b^T
  Var matmul_bt(Var a, Var b);
  Var add(Var a, Var b);
  /// Element-wise product.
  Var mul(Var a, Var b);
  /// Adds a 1 x n row to every row of x.
  Var add_row(Var x, Var row);
  Var scale(Var x, double s);
  Var gelu(Var x);
  Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
  Var softmax_rows(Var x);
  Var slice_rows(Var x, Eigen::Index start, Eigen::Index count);
  Var slice_cols(Var x, Eigen::Index start, Eigen::Index count);
  Var concat_rows(std::span<const Var> parts);
  Var concat_cols(std::span<const Var> parts);
  /// Column-wise mean over rows; result is 1 x n.
  Var mean_rows(Var x);
  /// Scales every row to unit Euclidean norm.
  Var normalize_rows(Var x, double eps = 1e-12);
  /// -log softmax(logits)[target] for a 1 x M logits row; result is 1 x 1.
  Var cross_entropy(Var logits, Eigen::Index target);

  /// Seeds d(root)/d(root) = seed and propagates to every leaf.
  void backward(Var root, double seed = 1.0);

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;
    Matrix grad;
    Matrix* sink = nullptr;
    bool requires_grad = false;
    std::function<void(Tape&, int)> backward;
  };

  Var push(Matrix value, bool requires_grad, std::function<void(Tape&, int)> bw);
  Node& node(Var v) { return nodes_[v.id]; }
  const Node& node(Var v) const { return nodes_[v.id]; }
  void accumulate(Var v, const Matrix& g);
  template <typename Expr>
  void accumulate_expr(Var v, const Expr& g);

  std::vector<Node> nodes_;
};

}  // namespace ag
}  // namespace vcl
