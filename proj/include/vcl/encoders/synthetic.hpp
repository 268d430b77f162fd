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
#include "vcl/encoders/text_encoder.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace vcl {

struct SyntheticOptions {
  int num_classes = 20;
  int tokens = 8;  // L, class token plus patches
  int input_width = 32;
  int model_width = 32;
  double sigma = -1.0;  // absolute noise scale; < 0 selects sigma_fraction * sigma_star
  double sigma_fraction = 0.5;
  int foreground_patches = 3;
  double marker_strength = 1.0;
  double attention_gain = 4.0;
  std::uint64_t seed = 1234;
  std::string text_template = "a video of a person {label}.";
};

/// Frozen single-layer attention encoder over 1 x P x D_in "frames" whose
/// pixels are already patch vectors (patch size 1, identity patch embedding,
/// zero class token):
///
///   Y = X + softmax(X Wq (X Wk)^T / sqrt(D_in)) X,   out = Y Wo
///
/// The class token has a zero query, so it attends uniformly and its output
/// is gain() times the mean patch projected by Wo.
class SyntheticSpatialEncoder final : public FrozenSpatialEncoder {
 public:
  SyntheticSpatialEncoder(int tokens, int input_width, int model_width, double attention_gain,
                          std::uint64_t seed);

  const EncoderProfile& profile() const override { return profile_; }
  Matrix input_layer(const Frame& frame) const override;
  ag::Var attention_stack(ag::Tape& tape, ag::Var tokens) const override;
  const std::string& digest() const override { return digest_; }

  /// P / (P + 1) for P patches.
  double gain() const;
  /// D_in x D_m with orthonormal columns.
  const Matrix& output_projection() const { return wo_.value; }

 private:
  EncoderProfile profile_;
  Parameter wq_, wk_, wo_;
  std::string digest_;
};

/// Seeded test double for both frozen encoders.
///
/// Class anchors are unit D_m vectors orthogonal to the all-ones direction
/// (so layer norms keep their direction) with a marker direction orthogonal
/// to all of them. A class-c video has per-frame mean patch
///
///   m_t = a_c + sigma (z d_c + eta_t),   z ~ Exp(1), eta_t ~ N(0, I / D_m)
///
/// where d_c points from a_c towards a fixed confuser class. A few foreground
/// patches carry a_c plus the marker; the remaining background patches absorb
/// the shift so the patch mean is exactly m_t. The text encoder maps the
/// rendered label of class c to a_c.
class SyntheticEncoderSuite {
 public:
  explicit SyntheticEncoderSuite(const SyntheticOptions& options);

  const SyntheticOptions& options() const { return options_; }
  int num_classes() const { return options_.num_classes; }
  /// num_classes x D_m, unit rows.
  const Matrix& anchors() const { return anchors_; }
  /// Zero when the anchors leave no room for a marker direction.
  const RowVector& marker() const { return marker_; }
  double theta_min() const { return theta_min_; }
  /// sin(theta_min / 2): distance from an anchor to the nearest decision
  /// boundary of the nearest-cosine rule.
  double sigma_star() const { return std::sin(theta_min_ / 2.0); }
  double sigma() const { return sigma_; }
  ClassId confuser(ClassId c) const { return confusers_.at(std::size_t(c)); }
  const std::vector<std::string>& class_names() const { return names_; }

  const SyntheticSpatialEncoder& spatial() const { return *spatial_; }
  const LookupTextEncoder& text() const { return *text_; }

  /// Raw-frame sample of class c. `noise` < 0 uses sigma().
  VideoSample make_sample(ClassId c, int frames, std::uint64_t sample_seed,
                          double noise = -1.0) const;

 private:
  SyntheticOptions options_;
  Matrix anchors_;
  RowVector marker_;
  double theta_min_ = 0.0;
  double sigma_ = 0.0;
  std::vector<ClassId> confusers_;
  std::vector<std::string> names_;
  std::unique_ptr<SyntheticSpatialEncoder> spatial_;
  std::unique_ptr<LookupTextEncoder> text_;
};

/// Largest pairwise cosine similarity between rows.
double max_pairwise_cosine(const Matrix& rows);

}  // namespace vcl
