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

#include "vcl/core/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vcl {

/// Partitions the classes into `n_tasks` disjoint tasks after a seeded
/// shuffle. Class ids are indices into `class_names`. When the class count is
/// not a multiple of `n_tasks`, the leftover classes go one per task to the
/// earliest tasks. Class ids inside a task are sorted ascending.
std::vector<TaskSpec> split_into_tasks(const std::vector<std::string>& class_names, int n_tasks,
                                       std::uint64_t seed);

/// Trainable scalars added by one task's prompt set:
/// N_p * L_sp * D_in + N_p * L_tp * D_m.
std::int64_t prompt_param_count(const Dims& dims);

}  // namespace vcl
