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

#include "vcl/core/text_bank.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>

namespace vcl {

/// Frozen language encoder: text -> unit-norm D_m vector.
class FrozenTextEncoder {
 public:
  virtual ~FrozenTextEncoder() = default;
  virtual int width() const = 0;
  virtual RowVector encode(std::string_view text) const = 0;
  virtual const std::string& digest() const = 0;
};

/// Deterministic text encoder with an optional fixed vocabulary. Registered
/// strings map to their registered unit vectors; any other string maps to a
/// unit vector drawn from a generator seeded by the string's hash.
class LookupTextEncoder final : public FrozenTextEncoder {
 public:
  LookupTextEncoder(int width, std::uint64_t seed, std::map<std::string, RowVector> table = {});

  int width() const override { return width_; }
  RowVector encode(std::string_view text) const override;
  const std::string& digest() const override { return digest_; }

 private:
  int width_;
  std::uint64_t seed_;
  std::map<std::string, RowVector, std::less<>> table_;
  std::string digest_;
};

/// Encodes `template(label)` for every label into a bank. Class ids default
/// to 0..n-1. Throws InputError for empty or duplicate labels.
TextClassBank encode_text(const FrozenTextEncoder& encoder, std::span<const std::string> labels,
                          const std::string& text_template,
                          std::span<const ClassId> class_ids = {});

}  // namespace vcl
