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

#include "vcl/encoders/cache.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/serialize.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;

namespace vcl {
namespace {

constexpr const char* kManifest = "manifest.tsv";
constexpr const char* kBlob = "tokens.f32";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::string encoder_cache_digest(const FrozenSpatialEncoder& encoder) {
  Sha256 h;
  h.update(encoder.profile().to_json().dump());
  h.update(encoder.digest());
  return h.hex();
}

CacheManifest build_cache(std::span<const VideoSample> samples, const FrozenSpatialEncoder& encoder,
                          const std::string& dir, const std::vector<std::string>& class_names) {
  CacheManifest m;
  m.encoder_digest = encoder_cache_digest(encoder);
  m.profile = encoder.profile().to_json();
  m.class_names = class_names;
  std::string blob;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const VideoSample& s = samples[i];
    const Tensor3 tokens = encoder.encode_patches(s);
    std::string bytes;
    for (const Matrix& t : tokens) {
      for (Eigen::Index r = 0; r < t.rows(); ++r)
        for (Eigen::Index c = 0; c < t.cols(); ++c) append_f32(bytes, static_cast<float>(t(r, c)));
    }
    CacheRecord rec;
    rec.id = s.source_id.empty() ? "sample/" + std::to_string(i) : s.source_id;
    if (rec.id.find_first_of("\t\n") != std::string::npos) {
      throw InputError("cache: sample id contains a tab or newline");
    }
    rec.label = s.label;
    rec.offset = blob.size();
    rec.length = bytes.size();
    rec.checksum = sha256_hex(bytes);
    blob += bytes;
    m.records.push_back(std::move(rec));
  }

  nlohmann::json header = {{"format", "vcl-cache"},
                           {"version", 1},
                           {"encoder_digest", m.encoder_digest},
                           {"profile", m.profile},
                           {"classes", m.class_names}};
  std::ostringstream manifest;
  manifest << header.dump() << '\n';
  for (const auto& r : m.records) {
    manifest << r.id << '\t' << r.label << '\t' << r.offset << '\t' << r.length << '\t'
             << r.checksum << '\n';
  }
  try {
    write_file((fs::path(dir) / kBlob).string(), blob);
    write_file((fs::path(dir) / kManifest).string(), manifest.str());
  } catch (const IoError& e) {
    throw CacheError(std::string("cache: ") + e.what());
  }
  return m;
}

CacheManifest read_cache_manifest(const std::string& dir) {
  std::string text;
  try {
    text = read_file((fs::path(dir) / kManifest).string());
  } catch (const IoError& e) {
    throw CacheError(std::string("cache: ") + e.what());
  }
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw CacheError("cache: empty manifest");
  CacheManifest m;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("format") != "vcl-cache" || header.at("version") != 1) {
      throw CacheError("cache: unsupported manifest format");
    }
    m.encoder_digest = header.at("encoder_digest").get<std::string>();
    m.profile = header.at("profile");
    m.class_names = header.at("classes").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CacheError(std::string("cache: bad manifest header: ") + e.what());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 5) throw CacheError("cache: malformed record: " + line);
    CacheRecord r;
    try {
      r.id = f[0];
      r.label = std::stoi(f[1]);
      r.offset = std::stoull(f[2]);
      r.length = std::stoull(f[3]);
      r.checksum = f[4];
    } catch (const std::exception&) {
      throw CacheError("cache: malformed record: " + line);
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

std::vector<VideoSample> load_cache(const std::string& dir, const FrozenSpatialEncoder& encoder) {
  const CacheManifest m = read_cache_manifest(dir);
  if (m.encoder_digest != encoder_cache_digest(encoder)) {
    throw CacheError("stale cache: written by encoder " + m.encoder_digest.substr(0, 12) +
                     ", current encoder is " + encoder_cache_digest(encoder).substr(0, 12));
  }
  std::string blob;
  try {
    blob = read_file((fs::path(dir) / kBlob).string());
  } catch (const IoError& e) {
    throw CacheError(std::string("cache: ") + e.what());
  }
  const auto& p = encoder.profile();
  const std::uint64_t frame_bytes = std::uint64_t(p.tokens) * p.input_width * sizeof(float);
  std::vector<VideoSample> out;
  out.reserve(m.records.size());
  for (const auto& r : m.records) {
    if (r.offset + r.length > blob.size() || r.length == 0 || r.length % frame_bytes != 0) {
      throw CacheError("cache: record out of range: " + r.id);
    }
    const std::string_view bytes(blob.data() + r.offset, r.length);
    if (sha256_hex(bytes) != r.checksum) throw CacheError("cache: checksum mismatch for " + r.id);
    VideoSample s;
    s.label = r.label;
    s.source_id = r.id;
    std::size_t pos = 0;
    for (std::uint64_t f = 0; f < r.length / frame_bytes; ++f) {
      Matrix t(p.tokens, p.input_width);
      for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = read_f32(bytes, pos);
      s.cached_tokens.push_back(std::move(t));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string default_cache_dir() {
  if (const char* env = std::getenv("VCL_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  return ".vcl-cache";
}

}  // namespace vcl
