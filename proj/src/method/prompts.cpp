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

#include "vcl/method/prompts.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"
#include "vcl/core/serialize.hpp"

#include <cmath>
#include <filesystem>

namespace fs = std::filesystem;

namespace vcl {

std::string PromptSet::digest() const {
  Sha256 h;
  h.update(&task_index, sizeof task_index);
  h.update(spatial.value);
  h.update(temporal.value);
  h.update(key);
  return h.hex();
}

PromptSet init_prompt_set(const TaskSpec& task, const Dims& dims, const Matrix& key_rows,
                          std::uint64_t seed) {
  if (key_rows.rows() != Eigen::Index(task.class_ids.size())) {
    throw ContractError("prompt set: " + std::to_string(key_rows.rows()) + " key rows for " +
                        std::to_string(task.class_ids.size()) + " classes");
  }
  if (key_rows.cols() != dims.model_width) throw ContractError("prompt set: key width mismatch");
  for (Eigen::Index r = 0; r < key_rows.rows(); ++r) {
    if (std::abs(key_rows.row(r).norm() - 1.0) > 1e-5) {
      throw ContractError("prompt set: key rows must be unit norm");
    }
  }
  Rng rng(derive_seed(seed, {hash_string("prompts"), std::uint64_t(task.task_index)}));
  PromptSet p;
  p.task_index = task.task_index;
  const std::string prefix = "task" + std::to_string(task.task_index);
  p.spatial = Parameter(prefix + ".spatial",
                        truncated_normal_matrix(rng, dims.spatial_prompt_rows(), dims.input_width, 0.02));
  p.temporal = Parameter(prefix + ".temporal",
                         truncated_normal_matrix(rng, dims.temporal_prompt_rows(), dims.model_width, 0.02));
  p.key = key_rows;
  p.key_classes = task.class_ids;
  return p;
}

PromptSet& PromptPool::back() {
  if (entries_.empty()) throw SelectionError("prompt pool is empty");
  return entries_.back();
}

void PromptPool::append(PromptSet set) {
  if (!entries_.empty()) {
    if (!entries_.back().frozen) {
      throw ContractError("prompt pool: entry " + std::to_string(entries_.back().task_index) +
                          " must be frozen before a new entry is added");
    }
    if (set.task_index <= entries_.back().task_index) {
      throw ContractError("prompt pool: task indices must increase");
    }
  }
  entries_.push_back(std::move(set));
}

void PromptPool::freeze_last() { back().frozen = true; }

std::vector<std::string> PromptPool::digests() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.digest());
  return out;
}

void PromptPool::save(const std::string& dir) const {
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& e : entries_) {
    const std::string file = "prompts_" + std::to_string(e.task_index) + ".vclt";
    TensorArchive a;
    a.header = {{"kind", "prompt_set"}, {"task_index", e.task_index}};
    a.tensors.push_back({"spatial", e.spatial.value});
    a.tensors.push_back({"temporal", e.temporal.value});
    a.tensors.push_back({"key", e.key});
    write_tensor_archive((fs::path(dir) / file).string(), a);
    manifest.push_back({{"task_index", e.task_index},
                        {"class_ids", e.key_classes},
                        {"frozen", e.frozen},
                        {"file", file},
                        {"digest", e.digest()}});
  }
  write_file((fs::path(dir) / "pool.json").string(), manifest.dump(2) + "\n");
}

PromptPool PromptPool::load(const std::string& dir) {
  const auto manifest = nlohmann::json::parse(read_file((fs::path(dir) / "pool.json").string()));
  PromptPool pool;
  for (const auto& m : manifest) {
    const TensorArchive a = read_tensor_archive((fs::path(dir) / m.at("file").get<std::string>()).string());
    PromptSet p;
    p.task_index = m.at("task_index").get<int>();
    p.spatial = Parameter("task" + std::to_string(p.task_index) + ".spatial", a.get("spatial"));
    p.temporal = Parameter("task" + std::to_string(p.task_index) + ".temporal", a.get("temporal"));
    p.key = a.get("key");
    p.key_classes = m.at("class_ids").get<std::vector<ClassId>>();
    p.frozen = m.at("frozen").get<bool>();
    if (p.key.rows() != Eigen::Index(p.key_classes.size())) {
      throw ContractError("prompt pool: key rows do not match class ids");
    }
    pool.entries_.push_back(std::move(p));
  }
  return pool;
}

std::size_t select_prompt_index(const RowVector& query, const PromptPool& pool) {
  if (pool.empty()) throw SelectionError("prompt selection: empty pool");
  const double qn = query.norm();
  if (!std::isfinite(qn) || qn == 0.0) throw SelectionError("prompt selection: degenerate query");
  const RowVector q = query / qn;
  std::size_t best = 0;
  double best_distance = INFINITY;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Matrix& key = pool.at(i).key;
    for (Eigen::Index r = 0; r < key.rows(); ++r) {
      double dot = 0.0;
      for (Eigen::Index k = 0; k < q.size(); ++k) dot += key(r, k) * q(k);
      const double distance = 1.0 - dot / key.row(r).norm();
      if (distance < best_distance) {
        best_distance = distance;
        best = i;
      }
    }
  }
  return best;
}

}  // namespace vcl
