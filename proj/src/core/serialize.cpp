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

#include "vcl/core/serialize.hpp"

#include "vcl/core/errors.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vcl {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest initialisation failed");
  }
}

Sha256::~Sha256() {
  if (impl_ && impl_->ctx) EVP_MD_CTX_free(impl_->ctx);
}

Sha256& Sha256::update(const void* data, std::size_t n) {
  EVP_DigestUpdate(impl_->ctx, data, n);
  return *this;
}

Sha256& Sha256::update(const Matrix& m) {
  const std::int64_t shape[2] = {m.rows(), m.cols()};
  update(shape, sizeof shape);
  // Column-major storage of a dense Eigen matrix is contiguous.
  return update(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

std::string Sha256::hex() {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, md, &len);
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(digits[md[i] >> 4]);
    out.push_back(digits[md[i] & 15]);
  }
  EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
  return out;
}

std::string sha256_hex(std::string_view bytes) { return Sha256().update(bytes).hex(); }

std::string digest_parameters(std::span<const Parameter* const> params) {
  Sha256 h;
  for (const Parameter* p : params) {
    h.update(p->name);
    h.update(p->value);
  }
  return h.hex();
}

void append_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void append_f32(std::string& out, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

std::uint32_t read_u32(std::string_view in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw InputError("unexpected end of binary data");
  std::uint32_t v;
  std::memcpy(&v, in.data() + pos, 4);
  pos += 4;
  return v;
}

float read_f32(std::string_view in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw InputError("unexpected end of binary data");
  float v;
  std::memcpy(&v, in.data() + pos, 4);
  pos += 4;
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

const Matrix& TensorArchive::get(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw ContractError("tensor archive has no tensor named '" + name + "'");
}

bool TensorArchive::contains(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

void write_tensor_archive(const std::string& path, const TensorArchive& archive) {
  std::string out = "VCLT";
  append_u32(out, 1);
  const std::string header = archive.header.dump();
  append_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  append_u32(out, static_cast<std::uint32_t>(archive.tensors.size()));
  for (const auto& t : archive.tensors) {
    append_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    append_u32(out, static_cast<std::uint32_t>(t.value.rows()));
    append_u32(out, static_cast<std::uint32_t>(t.value.cols()));
    for (Eigen::Index r = 0; r < t.value.rows(); ++r)
      for (Eigen::Index c = 0; c < t.value.cols(); ++c)
        append_f32(out, static_cast<float>(t.value(r, c)));
  }
  write_file(path, out);
}

TensorArchive read_tensor_archive(const std::string& path) {
  const std::string bytes = read_file(path);
  std::string_view in(bytes);
  if (in.substr(0, 4) != "VCLT") throw InputError("'" + path + "' is not a tensor archive");
  std::size_t pos = 4;
  if (read_u32(in, pos) != 1) throw InputError("unsupported tensor archive version");
  const auto hlen = read_u32(in, pos);
  if (pos + hlen > in.size()) throw InputError("truncated tensor archive header");
  TensorArchive archive;
  archive.header = nlohmann::json::parse(in.substr(pos, hlen));
  pos += hlen;
  const auto count = read_u32(in, pos);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto nlen = read_u32(in, pos);
    if (pos + nlen > in.size()) throw InputError("truncated tensor name");
    t.name = std::string(in.substr(pos, nlen));
    pos += nlen;
    const auto rows = read_u32(in, pos);
    const auto cols = read_u32(in, pos);
    t.value.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) t.value(r, c) = read_f32(in, pos);
    archive.tensors.push_back(std::move(t));
  }
  return archive;
}

void load_parameters(const TensorArchive& archive, std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    const Matrix& v = archive.get(p->name);
    if (!same_shape(v, p->value)) {
      throw ContractError("checkpoint tensor '" + p->name + "' has shape " + shape_string(v) +
                          ", expected " + shape_string(p->value));
    }
    p->value = v;
    p->zero_grad();
  }
}

nlohmann::json to_json(const Dims& d) {
  return {{"frames", d.frames},
          {"tokens", d.tokens},
          {"input_width", d.input_width},
          {"model_width", d.model_width},
          {"prompts_per_task", d.prompts_per_task},
          {"spatial_prompt_len", d.spatial_prompt_len},
          {"temporal_prompt_len", d.temporal_prompt_len}};
}

Dims dims_from_json(const nlohmann::json& j) {
  Dims d;
  d.frames = j.at("frames");
  d.tokens = j.at("tokens");
  d.input_width = j.at("input_width");
  d.model_width = j.at("model_width");
  d.prompts_per_task = j.at("prompts_per_task");
  d.spatial_prompt_len = j.at("spatial_prompt_len");
  d.temporal_prompt_len = j.at("temporal_prompt_len");
  return d;
}

nlohmann::json to_json(const TaskSpec& t) {
  return {{"task_index", t.task_index}, {"class_ids", t.class_ids}, {"class_names", t.class_names}};
}

TaskSpec task_from_json(const nlohmann::json& j) {
  TaskSpec t;
  t.task_index = j.at("task_index");
  t.class_ids = j.at("class_ids").get<std::vector<ClassId>>();
  t.class_names = j.at("class_names").get<std::vector<std::string>>();
  return t;
}

}  // namespace vcl
