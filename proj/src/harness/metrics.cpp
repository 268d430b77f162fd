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

#include "vcl/harness/metrics.hpp"

#include "vcl/core/errors.hpp"

namespace vcl {
namespace {

void require_final_row(const AccuracyMatrix& a) {
  if (a.size() < 1) throw ContractError("metrics: empty accuracy matrix");
  const int n = a.size() - 1;
  if (a.row_length(n) != a.size()) throw ContractError("metrics: final row is incomplete");
}

}  // namespace

double compute_acc(const AccuracyMatrix& a) {
  require_final_row(a);
  const int n = a.size() - 1;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) sum += a.at(n, j);
  return sum / double(a.size());
}

std::optional<double> compute_bwf(const AccuracyMatrix& a) {
  require_final_row(a);
  if (a.size() < 2) return std::nullopt;
  const int n = a.size() - 1;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!a.defined(i, i)) throw ContractError("metrics: diagonal entry undefined");
    sum += a.at(i, i) - a.at(n, i);
  }
  return sum / double(n);
}

}  // namespace vcl
