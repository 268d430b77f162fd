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

#include "vcl/core/rng.hpp"
#include "vcl/core/types.hpp"

#include <map>
#include <vector>

namespace vcl {

/// Class-balanced exemplar store under a global instance budget.
///
/// Exemplars are kept in cached-token form. Every rebalance assigns each seen
/// class floor(budget / classes) slots and hands the remainder out one slot at
/// a time in the order classes were first seen, so per-class counts never
/// differ by more than one (unless a class has fewer candidates than slots).
class ReplayMemory {
 public:
  explicit ReplayMemory(int budget = 0) : budget_(budget) {}

  int budget() const { return budget_; }
  std::size_t size() const;
  std::size_t count(ClassId c) const;
  bool empty() const { return size() == 0; }
  const std::map<ClassId, std::vector<VideoSample>>& store() const { return store_; }
  const std::vector<ClassId>& class_order() const { return order_; }

  /// Slot allocation for `n_classes` seen classes (first-seen order).
  std::vector<int> allocation(std::size_t n_classes) const;

  /// Adds a task's classes and rebalances. `candidates` maps each new class to
  /// its available samples (cached-token form). New classes are filled by
  /// seeded sampling without replacement; classes over quota are evicted
  /// uniformly at random. Throws ConfigError when the budget cannot hold one
  /// exemplar per seen class unless `allow_empty_classes` is set.
  void add_task(const std::map<ClassId, std::vector<VideoSample>>& candidates, Rng& rng,
                bool allow_empty_classes = false);

  /// All stored samples, ordered by class first-seen order then slot.
  std::vector<const VideoSample*> samples() const;

 private:
  int budget_;
  std::map<ClassId, std::vector<VideoSample>> store_;
  std::vector<ClassId> order_;
};

}  // namespace vcl
