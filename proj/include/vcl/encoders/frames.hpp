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

#include "vcl/core/rng.hpp"
#include "vcl/core/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace vcl {

/// Reads a binary PPM (P6, maxval <= 255). Pixels are scaled to [0, 1].
Frame read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Frame& frame);

/// Bilinear resize so the shorter side equals `side`, then a centred
/// `side` x `side` crop.
Frame resize_center_crop(const Frame& frame, int side);

/// Per-channel (x - mean) / std.
void normalize_channels(Frame& frame, const std::array<float, 3>& mean,
                        const std::array<float, 3>& std);

/// Resize, crop and normalise with the published CLIP image constants.
Frame clip_preprocess(const Frame& frame, int side = 224);

/// Segment-based sampling: `raw` frames are split into `segments` equal
/// segments; training draws one uniformly random frame per segment, evaluation
/// takes each segment's centre frame. With raw == segments both return
/// 0..segments-1.
std::vector<int> segment_indices(int raw, int segments, bool training, Rng* rng = nullptr);

/// One video in a frame-directory dataset.
struct FrameVideo {
  std::string id;  // "<split>/<class>/<video>"
  std::string class_name;
  std::vector<std::string> frame_paths;  // sorted
};

/// Lists `<root>/<split>/<class>/<video>/*.ppm`. Class directories are listed
/// in sorted order; `<root>/classes.txt`, when present, fixes the class order
/// and rejects unknown class directories.
std::vector<FrameVideo> list_frame_videos(const std::string& root, const std::string& split);
std::vector<std::string> read_class_names(const std::string& root);

}  // namespace vcl
