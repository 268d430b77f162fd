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

#include <span>
#include <string>
#include <vector>

namespace vcl {

/// Unit-normalised text embeddings of every class seen so far. The rows are
/// the classifier's only "weights"; they are append-only.
class TextClassBank {
 public:
  TextClassBank() = default;
  TextClassBank(int width, std::string text_template)
      : embeddings_(0, width), template_(std::move(text_template)) {}

  /// Appends rows for new classes. Throws ContractError for duplicate ids,
  /// width mismatch or rows that are not unit norm (tolerance 1e-5).
  void append(std::span<const ClassId> class_ids, const Matrix& rows);

  int size() const { return static_cast<int>(class_ids_.size()); }
  bool empty() const { return class_ids_.empty(); }
  int width() const { return static_cast<int>(embeddings_.cols()); }
  const Matrix& embeddings() const { return embeddings_; }
  const std::vector<ClassId>& class_ids() const { return class_ids_; }
  const std::string& text_template() const { return template_; }

  bool contains(ClassId c) const { return row_of_or(c) >= 0; }
  /// Row index of a class; throws ContractError when absent.
  int row_of(ClassId c) const;
  int row_of_or(ClassId c, int fallback = -1) const;
  /// Rows for the given classes in the given order.
  Matrix rows_for(std::span<const ClassId> class_ids) const;
  /// Bank holding only the listed classes (same row order as listed).
  TextClassBank restricted(std::span<const ClassId> class_ids) const;

 private:
  Matrix embeddings_;
  std::vector<ClassId> class_ids_;
  std::string template_;
};

/// Substitutes `label` for every `{label}` in the template.
std::string render_template(const std::string& text_template, const std::string& label);

}  // namespace vcl
