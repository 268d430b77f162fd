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

#include "vcl/encoders/frames.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace vcl {
namespace {

/// Next whitespace-delimited header field, skipping `#` comments.
std::string ppm_field(std::string_view in, std::size_t& pos) {
  for (;;) {
    while (pos < in.size() && std::isspace(static_cast<unsigned char>(in[pos]))) ++pos;
    if (pos < in.size() && in[pos] == '#') {
      while (pos < in.size() && in[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < in.size() && !std::isspace(static_cast<unsigned char>(in[pos]))) ++pos;
  return std::string(in.substr(start, pos - start));
}

int ppm_int(std::string_view in, std::size_t& pos, const std::string& path) {
  const std::string f = ppm_field(in, pos);
  try {
    return std::stoi(f);
  } catch (const std::exception&) {
    throw InputError("ppm: malformed header in " + path);
  }
}

}  // namespace

Frame read_ppm(const std::string& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  if (ppm_field(bytes, pos) != "P6") throw InputError("ppm: not a binary P6 file: " + path);
  const int w = ppm_int(bytes, pos, path);
  const int h = ppm_int(bytes, pos, path);
  const int maxval = ppm_int(bytes, pos, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw InputError("ppm: unsupported dimensions or depth in " + path);
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t n = std::size_t(w) * h * 3;
  if (bytes.size() < pos + n) throw InputError("ppm: truncated raster in " + path);
  Frame f(h, w, 3);
  for (std::size_t i = 0; i < n; ++i) {
    f.pixels[i] = static_cast<unsigned char>(bytes[pos + i]) / float(maxval);
  }
  return f;
}

void write_ppm(const std::string& path, const Frame& frame) {
  if (frame.channels != 3) throw InputError("ppm: need 3 channels");
  std::string out = "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) +
                    "\n255\n";
  for (float v : frame.pixels) {
    out.push_back(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
  }
  write_file(path, out);
}

Frame resize_center_crop(const Frame& frame, int side) {
  if (frame.height <= 0 || frame.width <= 0) throw InputError("resize: empty frame");
  const double scale = double(side) / std::min(frame.height, frame.width);
  const int rh = std::max(side, int(std::lround(frame.height * scale)));
  const int rw = std::max(side, int(std::lround(frame.width * scale)));
  const int oy = (rh - side) / 2;
  const int ox = (rw - side) / 2;
  Frame out(side, side, frame.channels);
  for (int y = 0; y < side; ++y) {
    const double sy = std::clamp((y + oy + 0.5) / scale - 0.5, 0.0, frame.height - 1.0);
    const int y0 = int(sy);
    const int y1 = std::min(y0 + 1, frame.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < side; ++x) {
      const double sx = std::clamp((x + ox + 0.5) / scale - 0.5, 0.0, frame.width - 1.0);
      const int x0 = int(sx);
      const int x1 = std::min(x0 + 1, frame.width - 1);
      const double fx = sx - x0;
      for (int c = 0; c < frame.channels; ++c) {
        const double top = frame.at(y0, x0, c) * (1 - fx) + frame.at(y0, x1, c) * fx;
        const double bottom = frame.at(y1, x0, c) * (1 - fx) + frame.at(y1, x1, c) * fx;
        out.at(y, x, c) = static_cast<float>(top * (1 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

void normalize_channels(Frame& frame, const std::array<float, 3>& mean,
                        const std::array<float, 3>& std) {
  if (frame.channels != 3) throw InputError("normalize: need 3 channels");
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    const std::size_t c = i % 3;
    frame.pixels[i] = (frame.pixels[i] - mean[c]) / std[c];
  }
}

Frame clip_preprocess(const Frame& frame, int side) {
  Frame out = resize_center_crop(frame, side);
  normalize_channels(out, {0.48145466f, 0.4578275f, 0.40821073f},
                     {0.26862954f, 0.26130258f, 0.27577711f});
  return out;
}

std::vector<int> segment_indices(int raw, int segments, bool training, Rng* rng) {
  if (raw < 1 || segments < 1) throw InputError("segment sampling: need frames and segments");
  if (training && rng == nullptr) throw ContractError("segment sampling: training needs an rng");
  std::vector<int> out(static_cast<std::size_t>(segments));
  const double len = double(raw) / segments;
  for (int i = 0; i < segments; ++i) {
    const double offset = training ? uniform01(*rng) * len : 0.5 * len;
    const int idx = static_cast<int>(std::floor(i * len + offset));
    out[std::size_t(i)] = std::clamp(idx, 0, raw - 1);
  }
  return out;
}

std::vector<std::string> read_class_names(const std::string& root) {
  const fs::path manifest = fs::path(root) / "classes.txt";
  std::vector<std::string> names;
  if (fs::exists(manifest)) {
    std::istringstream in(read_file(manifest.string()));
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      if (!line.empty()) names.push_back(line);
    }
    return names;
  }
  std::set<std::string> found;
  for (const char* split : {"train", "eval"}) {
    const fs::path dir = fs::path(root) / split;
    if (!fs::is_directory(dir)) continue;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory()) found.insert(e.path().filename().string());
    }
  }
  return {found.begin(), found.end()};
}

std::vector<FrameVideo> list_frame_videos(const std::string& root, const std::string& split) {
  const fs::path dir = fs::path(root) / split;
  if (!fs::is_directory(dir)) throw IoError("dataset split not found: " + dir.string());
  const auto names = read_class_names(root);
  const std::set<std::string> known(names.begin(), names.end());
  std::vector<std::string> classes;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_directory()) continue;
    const std::string name = e.path().filename().string();
    if (!known.count(name)) throw InputError("class directory not in manifest: " + name);
    classes.push_back(name);
  }
  std::sort(classes.begin(), classes.end());
  std::vector<FrameVideo> out;
  for (const auto& cls : classes) {
    std::vector<fs::path> videos;
    for (const auto& e : fs::directory_iterator(dir / cls)) {
      if (e.is_directory()) videos.push_back(e.path());
    }
    std::sort(videos.begin(), videos.end());
    for (const auto& v : videos) {
      FrameVideo fv;
      fv.id = split + "/" + cls + "/" + v.filename().string();
      fv.class_name = cls;
      for (const auto& e : fs::directory_iterator(v)) {
        if (e.is_regular_file() && e.path().extension() == ".ppm") {
          fv.frame_paths.push_back(e.path().string());
        }
      }
      std::sort(fv.frame_paths.begin(), fv.frame_paths.end());
      if (fv.frame_paths.empty()) throw InputError("video has no frames: " + fv.id);
      out.push_back(std::move(fv));
    }
  }
  return out;
}

}  // namespace vcl
