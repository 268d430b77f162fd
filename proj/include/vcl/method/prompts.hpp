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

#include "vcl/core/autograd.hpp"
#include "vcl/core/text_bank.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace vcl {

/// One task's prompts: spatial (N_p L_sp x D_in) and temporal (N_p L_tp x D_m)
/// tensors stored flattened, plus the frozen per-class key rows.
struct PromptSet {
  int task_index = 0;
  Parameter spatial;
  Parameter temporal;
  Matrix key;  // M_n x D_m, unit rows
  std::vector<ClassId> key_classes;
  bool frozen = false;

  std::int64_t parameter_count() const { return spatial.size() + temporal.size(); }
  /// Digest over the task index, both prompt tensors and the key.
  std::string digest() const;
};

/// Seeded truncated-normal prompts (std 0.02) with the task's text rows as
/// keys. Throws ContractError when `key_rows` does not match the task's
/// classes or is not unit norm.
PromptSet init_prompt_set(const TaskSpec& task, const Dims& dims, const Matrix& key_rows,
                          std::uint64_t seed);

/// Append-only list of prompt sets ordered by task index.
class PromptPool {
 public:
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<PromptSet>& entries() const { return entries_; }
  const PromptSet& at(std::size_t i) const { return entries_.at(i); }
  /// The most recent entry; only it may still be trainable.
  PromptSet& back();

  /// Throws ContractError unless every existing entry is frozen and the
  /// task index increases.
  void append(PromptSet set);
  void freeze_last();

  std::vector<std::string> digests() const;

  /// `<dir>/prompts_<task>.vclt` per entry and `<dir>/pool.json`.
  void save(const std::string& dir) const;
  static PromptPool load(const std::string& dir);

 private:
  std::vector<PromptSet> entries_;
};

/// Index of the entry owning the key row nearest (in cosine distance) to the
/// query, scanning entries and rows in order so ties keep the lowest task.
/// Throws SelectionError for an empty pool or a degenerate query.
std::size_t select_prompt_index(const RowVector& query, const PromptPool& pool);

}  // namespace vcl
