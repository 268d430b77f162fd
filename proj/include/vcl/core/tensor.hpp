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

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace vcl {

// Sequences are stored one token per row.
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Rank-3 tensor stored as a list of equally shaped matrices (e.g. T x L x D).
using Tensor3 = std::vector<Matrix>;

/// Rounds every entry to the nearest float32 value. Tokens that are persisted
/// as float32 are kept representable so a cache round trip is exact.
inline void round_to_float32(Matrix& m) {
  m = m.cast<float>().cast<double>();
}

inline bool same_shape(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

inline std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

/// Stacks the rows of equally wide matrices.
inline Matrix vstack(const std::vector<Matrix>& parts) {
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.empty() ? 0 : parts.front().cols();
  for (const auto& p : parts) rows += p.rows();
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.middleRows(r, p.rows()) = p;
    r += p.rows();
  }
  return out;
}

}  // namespace vcl
