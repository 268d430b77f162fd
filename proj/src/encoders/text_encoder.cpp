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

#include "vcl/encoders/text_encoder.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"
#include "vcl/core/serialize.hpp"

#include <set>

namespace vcl {

LookupTextEncoder::LookupTextEncoder(int width, std::uint64_t seed,
                                     std::map<std::string, RowVector> table)
    : width_(width), seed_(seed) {
  if (width <= 0) throw ConfigError("text encoder width must be positive");
  Sha256 h;
  h.update("lookup-text-encoder");
  h.update(&seed_, sizeof seed_);
  for (auto& [text, v] : table) {
    if (v.size() != width) throw ConfigError("text encoder: vector width mismatch for '" + text + "'");
    RowVector unit = v / v.norm();
    h.update(text);
    h.update(Matrix(unit));
    table_.emplace(text, std::move(unit));
  }
  digest_ = h.hex();
}

RowVector LookupTextEncoder::encode(std::string_view text) const {
  if (auto it = table_.find(text); it != table_.end()) return it->second;
  Rng rng(derive_seed(seed_, {hash_string(text)}));
  RowVector v(width_);
  do {
    for (int i = 0; i < width_; ++i) v(i) = standard_normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

TextClassBank encode_text(const FrozenTextEncoder& encoder, std::span<const std::string> labels,
                          const std::string& text_template, std::span<const ClassId> class_ids) {
  if (labels.empty()) throw InputError("encode_text: no labels");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InputError("encode_text: duplicate label '" + l + "'");
  }
  std::vector<ClassId> ids(class_ids.begin(), class_ids.end());
  if (ids.empty()) {
    for (std::size_t i = 0; i < labels.size(); ++i) ids.push_back(static_cast<ClassId>(i));
  }
  if (ids.size() != labels.size()) throw InputError("encode_text: class id count mismatch");
  Matrix rows(static_cast<Eigen::Index>(labels.size()), encoder.width());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    RowVector v = encoder.encode(render_template(text_template, labels[i]));
    rows.row(Eigen::Index(i)) = v / v.norm();
  }
  TextClassBank bank(encoder.width(), text_template);
  bank.append(ids, rows);
  return bank;
}

}  // namespace vcl
