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
#include "vcl/core/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vcl {

/// Incremental SHA-256 (OpenSSL EVP).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(const void* data, std::size_t n);
  Sha256& update(std::string_view s) { return update(s.data(), s.size()); }
  /// Hashes shape then raw little-endian doubles.
  Sha256& update(const Matrix& m);
  std::string hex();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view bytes);

/// Digest over names, shapes and exact values of a parameter group.
std::string digest_parameters(std::span<const Parameter* const> params);

struct NamedTensor {
  std::string name;
  Matrix value;
};

/// Binary archive of named 2-D tensors with a JSON header. Payloads are
/// little-endian float32.
///
///   "VCLT" u32 version | u32 header_len | header json
///   u32 count | { u32 name_len | name | u32 rows | u32 cols | f32[rows*cols] (row-major) }*
struct TensorArchive {
  nlohmann::json header = nlohmann::json::object();
  std::vector<NamedTensor> tensors;

  const Matrix& get(const std::string& name) const;
  bool contains(const std::string& name) const;
};

void write_tensor_archive(const std::string& path, const TensorArchive& archive);
TensorArchive read_tensor_archive(const std::string& path);

/// Copies archive tensors into parameters by name; throws ContractError on a
/// missing name or a shape mismatch.
void load_parameters(const TensorArchive& archive, std::span<Parameter* const> params);

// Little-endian primitives shared by the cache and archive writers.
void append_u32(std::string& out, std::uint32_t v);
void append_f32(std::string& out, float v);
std::uint32_t read_u32(std::string_view in, std::size_t& pos);
float read_f32(std::string_view in, std::size_t& pos);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

nlohmann::json to_json(const Dims& d);
Dims dims_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaskSpec& t);
TaskSpec task_from_json(const nlohmann::json& j);

}  // namespace vcl
