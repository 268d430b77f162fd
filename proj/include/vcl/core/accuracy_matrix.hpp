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

#include <string>
#include <vector>

namespace vcl {

/// Lower-triangular matrix of task accuracies: entry (i, j), j <= i, is the
/// accuracy on task j's evaluation set after training task i. Indices are
/// zero-based in code and one-based in the persisted CSV.
class AccuracyMatrix {
 public:
  AccuracyMatrix() = default;
  explicit AccuracyMatrix(int n);

  int size() const { return n_; }
  bool defined(int i, int j) const;
  double at(int i, int j) const;
  void set(int i, int j, double acc);
  /// Number of defined entries in row i.
  int row_length(int i) const;

  /// `after_task,task_1,...,task_n`, six decimals, undefined entries empty.
  std::string to_csv() const;
  static AccuracyMatrix from_csv(const std::string& text);

  /// Dense rows with undefined entries as NaN.
  const std::vector<std::vector<double>>& rows() const { return a_; }

 private:
  int n_ = 0;
  std::vector<std::vector<double>> a_;
};

}  // namespace vcl
