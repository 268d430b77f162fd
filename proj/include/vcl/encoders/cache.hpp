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

#include "vcl/encoders/spatial_encoder.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vcl {

struct CacheRecord {
  std::string id;
  ClassId label = -1;
  std::uint64_t offset = 0;  // bytes into the blob
  std::uint64_t length = 0;  // bytes
  std::string checksum;      // SHA-256 of the record bytes
};

/// On disk: `manifest.tsv` (one JSON header line, then one tab-separated
/// record per line: id, label, offset, length, checksum) and `tokens.f32`
/// (little-endian float32, frames x L x D_in per record, row-major).
struct CacheManifest {
  std::string encoder_digest;
  nlohmann::json profile;
  std::vector<std::string> class_names;
  std::vector<CacheRecord> records;
};

/// Digest binding a cache to an encoder's profile and weights.
std::string encoder_cache_digest(const FrozenSpatialEncoder& encoder);

/// Encodes every sample with the input layer and writes the cache into `dir`.
/// Samples without a source id are named by position.
CacheManifest build_cache(std::span<const VideoSample> samples, const FrozenSpatialEncoder& encoder,
                          const std::string& dir, const std::vector<std::string>& class_names = {});

CacheManifest read_cache_manifest(const std::string& dir);

/// Loads every record in cached-token form. Throws CacheError when the
/// manifest was written by a different encoder or a checksum fails.
std::vector<VideoSample> load_cache(const std::string& dir, const FrozenSpatialEncoder& encoder);

/// Default cache location: $VCL_CACHE_DIR, else ".vcl-cache".
std::string default_cache_dir();

}  // namespace vcl
