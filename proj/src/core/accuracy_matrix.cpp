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

#include "vcl/core/accuracy_matrix.hpp"

#include "vcl/core/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace vcl {

AccuracyMatrix::AccuracyMatrix(int n)
    : n_(n), a_(n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN())) {
  if (n < 0) throw ContractError("accuracy matrix size must be non-negative");
}

bool AccuracyMatrix::defined(int i, int j) const {
  return i >= 0 && i < n_ && j >= 0 && j <= i && !std::isnan(a_[i][j]);
}

double AccuracyMatrix::at(int i, int j) const {
  if (!defined(i, j)) {
    throw ContractError("accuracy matrix entry (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ") is undefined");
  }
  return a_[i][j];
}

void AccuracyMatrix::set(int i, int j, double acc) {
  if (i < 0 || i >= n_ || j < 0 || j > i) {
    throw ContractError("accuracy matrix: only entries with j <= i are defined");
  }
  if (!(acc >= 0.0 && acc <= 1.0)) throw ContractError("accuracy must lie in [0, 1]");
  a_[i][j] = acc;
}

int AccuracyMatrix::row_length(int i) const {
  int n = 0;
  for (int j = 0; j < n_; ++j) n += defined(i, j) ? 1 : 0;
  return n;
}

std::string AccuracyMatrix::to_csv() const {
  std::string out = "after_task";
  for (int j = 0; j < n_; ++j) out += ",task_" + std::to_string(j + 1);
  out += "\n";
  char buf[32];
  for (int i = 0; i < n_; ++i) {
    out += std::to_string(i + 1);
    for (int j = 0; j < n_; ++j) {
      out += ",";
      if (defined(i, j)) {
        std::snprintf(buf, sizeof buf, "%.6f", a_[i][j]);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

AccuracyMatrix AccuracyMatrix::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("after_task", 0) != 0) {
    throw InputError("accuracy CSV: missing 'after_task' header");
  }
  int n = 0;
  for (char c : line) n += (c == ',') ? 1 : 0;
  AccuracyMatrix m(n);
  int i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= n) throw InputError("accuracy CSV: more rows than tasks");
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (std::stoi(cell) != i + 1) throw InputError("accuracy CSV: rows out of order");
    for (int j = 0; j < n; ++j) {
      if (!std::getline(row, cell, ',')) cell.clear();
      if (!cell.empty()) m.set(i, j, std::stod(cell));
    }
    ++i;
  }
  return m;
}

}  // namespace vcl
