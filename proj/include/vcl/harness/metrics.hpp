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

#include "vcl/core/accuracy_matrix.hpp"

#include <optional>

namespace vcl {

/// Mean of the final row. Throws ContractError when the final row is
/// incomplete or the matrix is empty.
double compute_acc(const AccuracyMatrix& a);

/// Mean over i < n of A[i][i] - A[n][i]; absent for a single task. Throws
/// ContractError when a needed entry is undefined.
std::optional<double> compute_bwf(const AccuracyMatrix& a);

}  // namespace vcl
