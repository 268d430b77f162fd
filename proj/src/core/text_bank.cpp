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

#include "vcl/core/text_bank.hpp"

#include "vcl/core/errors.hpp"

#include <cmath>

namespace vcl {

void TextClassBank::append(std::span<const ClassId> class_ids, const Matrix& rows) {
  if (static_cast<Eigen::Index>(class_ids.size()) != rows.rows()) {
    throw ContractError("text bank: " + std::to_string(class_ids.size()) + " ids for " +
                        std::to_string(rows.rows()) + " rows");
  }
  if (embeddings_.cols() == 0 && embeddings_.rows() == 0) embeddings_.resize(0, rows.cols());
  if (rows.cols() != embeddings_.cols()) {
    throw ContractError("text bank: row width " + std::to_string(rows.cols()) + " != " +
                        std::to_string(embeddings_.cols()));
  }
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    if (contains(class_ids[i])) {
      throw ContractError("text bank: class " + std::to_string(class_ids[i]) + " already present");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (class_ids[k] == class_ids[i]) throw ContractError("text bank: duplicate class id");
    }
    if (std::abs(rows.row(Eigen::Index(i)).norm() - 1.0) > 1e-5) {
      throw ContractError("text bank: row for class " + std::to_string(class_ids[i]) +
                          " is not unit norm");
    }
  }
  const Eigen::Index old = embeddings_.rows();
  Matrix grown(old + rows.rows(), rows.cols());
  grown.topRows(old) = embeddings_;
  grown.bottomRows(rows.rows()) = rows;
  embeddings_ = std::move(grown);
  class_ids_.insert(class_ids_.end(), class_ids.begin(), class_ids.end());
}

int TextClassBank::row_of_or(ClassId c, int fallback) const {
  for (std::size_t i = 0; i < class_ids_.size(); ++i) {
    if (class_ids_[i] == c) return static_cast<int>(i);
  }
  return fallback;
}

int TextClassBank::row_of(ClassId c) const {
  const int r = row_of_or(c);
  if (r < 0) throw ContractError("text bank has no class " + std::to_string(c));
  return r;
}

Matrix TextClassBank::rows_for(std::span<const ClassId> class_ids) const {
  Matrix out(static_cast<Eigen::Index>(class_ids.size()), embeddings_.cols());
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    out.row(Eigen::Index(i)) = embeddings_.row(row_of(class_ids[i]));
  }
  return out;
}

TextClassBank TextClassBank::restricted(std::span<const ClassId> class_ids) const {
  TextClassBank out(width(), template_);
  out.append(class_ids, rows_for(class_ids));
  return out;
}

std::string render_template(const std::string& text_template, const std::string& label) {
  static const std::string key = "{label}";
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    const auto hit = text_template.find(key, pos);
    if (hit == std::string::npos) break;
    out += text_template.substr(pos, hit - pos);
    out += label;
    pos = hit + key.size();
  }
  out += text_template.substr(pos);
  return out;
}

}  // namespace vcl
