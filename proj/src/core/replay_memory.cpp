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

#include "vcl/core/replay_memory.hpp"

#include "vcl/core/errors.hpp"

#include <algorithm>
#include <numeric>

namespace vcl {

std::size_t ReplayMemory::size() const {
  std::size_t n = 0;
  for (const auto& [c, v] : store_) n += v.size();
  return n;
}

std::size_t ReplayMemory::count(ClassId c) const {
  auto it = store_.find(c);
  return it == store_.end() ? 0 : it->second.size();
}

std::vector<int> ReplayMemory::allocation(std::size_t n_classes) const {
  std::vector<int> out(n_classes, 0);
  if (n_classes == 0) return out;
  const int base = budget_ / static_cast<int>(n_classes);
  const int extra = budget_ % static_cast<int>(n_classes);
  for (std::size_t i = 0; i < n_classes; ++i) out[i] = base + (int(i) < extra ? 1 : 0);
  return out;
}

void ReplayMemory::add_task(const std::map<ClassId, std::vector<VideoSample>>& candidates,
                            Rng& rng, bool allow_empty_classes) {
  for (const auto& [c, samples] : candidates) {
    if (store_.count(c)) throw ContractError("replay memory: class " + std::to_string(c) +
                                             " was already added");
  }
  std::vector<ClassId> order = order_;
  for (const auto& [c, samples] : candidates) order.push_back(c);
  if (!allow_empty_classes && budget_ < static_cast<int>(order.size())) {
    throw ConfigError("replay memory: budget " + std::to_string(budget_) +
                      " cannot hold one exemplar for each of " + std::to_string(order.size()) +
                      " classes");
  }

  // Water-fill: classes short of candidates release their slots to the rest.
  std::vector<int> available(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = candidates.find(order[i]);
    available[i] = static_cast<int>(it != candidates.end() ? it->second.size()
                                                           : store_.at(order[i]).size());
  }
  std::vector<int> quota(order.size(), 0);
  int remaining = budget_;
  bool progress = true;
  while (remaining > 0 && progress) {
    progress = false;
    for (std::size_t i = 0; i < order.size() && remaining > 0; ++i) {
      if (quota[i] < available[i]) {
        ++quota[i];
        --remaining;
        progress = true;
      }
    }
  }

  for (std::size_t i = 0; i < order.size(); ++i) {
    const ClassId c = order[i];
    auto it = candidates.find(c);
    if (it != candidates.end()) {
      std::vector<std::size_t> idx(it->second.size());
      std::iota(idx.begin(), idx.end(), 0);
      shuffle(idx, rng);
      idx.resize(quota[i]);
      std::sort(idx.begin(), idx.end());
      auto& slot = store_[c];
      for (auto k : idx) slot.push_back(it->second[k]);
    } else {
      auto& slot = store_.at(c);
      while (static_cast<int>(slot.size()) > quota[i]) {
        slot.erase(slot.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, slot.size())));
      }
    }
  }
  order_ = std::move(order);
}

std::vector<const VideoSample*> ReplayMemory::samples() const {
  std::vector<const VideoSample*> out;
  for (ClassId c : order_) {
    for (const auto& s : store_.at(c)) out.push_back(&s);
  }
  return out;
}

}  // namespace vcl
