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

#include "vcl/core/tasks.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"

#include <algorithm>
#include <numeric>

namespace vcl {

std::vector<TaskSpec> split_into_tasks(const std::vector<std::string>& class_names, int n_tasks,
                                       std::uint64_t seed) {
  const int n_classes = static_cast<int>(class_names.size());
  if (n_tasks < 1) throw ConfigError("split_into_tasks: n_tasks must be >= 1");
  if (n_tasks > n_classes) {
    throw ConfigError("split_into_tasks: " + std::to_string(n_tasks) + " tasks requested for " +
                      std::to_string(n_classes) + " classes");
  }

  std::vector<ClassId> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {hash_string("task-split")}));
  shuffle(order, rng);

  const int base = n_classes / n_tasks;
  const int extra = n_classes % n_tasks;
  std::vector<TaskSpec> tasks;
  tasks.reserve(n_tasks);
  int cursor = 0;
  for (int t = 0; t < n_tasks; ++t) {
    const int count = base + (t < extra ? 1 : 0);
    TaskSpec spec;
    spec.task_index = t + 1;
    spec.class_ids.assign(order.begin() + cursor, order.begin() + cursor + count);
    std::sort(spec.class_ids.begin(), spec.class_ids.end());
    for (ClassId c : spec.class_ids) spec.class_names.push_back(class_names[c]);
    tasks.push_back(std::move(spec));
    cursor += count;
  }
  return tasks;
}

std::int64_t prompt_param_count(const Dims& dims) {
  const std::int64_t np = dims.prompts_per_task;
  return np * dims.spatial_prompt_len * dims.input_width +
         np * dims.temporal_prompt_len * dims.model_width;
}

}  // namespace vcl
