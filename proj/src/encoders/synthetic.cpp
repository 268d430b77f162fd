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

#include "vcl/encoders/synthetic.hpp"

#include "vcl/core/errors.hpp"
#include "vcl/core/rng.hpp"
#include "vcl/core/serialize.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstdio>

namespace vcl {
namespace {

/// Orthonormal columns from the QR factorisation of a Gaussian matrix, with
/// signs fixed so that diag(R) > 0.
Matrix orthonormal_columns(const Matrix& gaussian) {
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(gaussian.rows(), gaussian.cols());
  const Matrix r = qr.matrixQR().topRows(gaussian.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < gaussian.cols(); ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  return q;
}

Matrix random_orthogonal(Rng& rng, int n) { return orthonormal_columns(normal_matrix(rng, n, n)); }

RowVector centered_unit(RowVector v) {
  v.array() -= v.mean();
  return v / v.norm();
}

}  // namespace

double max_pairwise_cosine(const Matrix& rows) {
  double best = -1.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      const double c = rows.row(i).dot(rows.row(j)) / (rows.row(i).norm() * rows.row(j).norm());
      best = std::max(best, c);
    }
  }
  return best;
}

SyntheticSpatialEncoder::SyntheticSpatialEncoder(int tokens, int input_width, int model_width,
                                                 double attention_gain, std::uint64_t seed) {
  if (tokens < 2 || input_width <= 0 || model_width <= 0) {
    throw ConfigError("synthetic encoder: need at least one patch and positive widths");
  }
  if (model_width > input_width) {
    throw ConfigError("synthetic encoder: model width must not exceed input width");
  }
  profile_.name = "synthetic-l" + std::to_string(tokens) + "-w" + std::to_string(input_width) +
                  "x" + std::to_string(model_width);
  profile_.frame_height = 1;
  profile_.frame_width = tokens - 1;
  profile_.channels = input_width;
  profile_.patch_size = 1;
  profile_.tokens = tokens;
  profile_.input_width = input_width;
  profile_.model_width = model_width;
  profile_.preprocessing = "none (pixels are patch vectors)";

  Rng rng(derive_seed(seed, {hash_string("synthetic-spatial")}));
  wq_ = Parameter("wq", random_orthogonal(rng, input_width) * attention_gain);
  wk_ = Parameter("wk", random_orthogonal(rng, input_width) * attention_gain);
  wo_ = Parameter("wo", orthonormal_columns(normal_matrix(rng, input_width, model_width)));
  const std::vector<const Parameter*> params = {&wq_, &wk_, &wo_};
  digest_ = digest_parameters(params);
}

double SyntheticSpatialEncoder::gain() const {
  const double p = profile_.patches();
  return p / (p + 1.0);
}

Matrix SyntheticSpatialEncoder::input_layer(const Frame& frame) const {
  check_frame(frame);
  Matrix tokens = Matrix::Zero(profile_.tokens, profile_.input_width);
  for (int j = 0; j < profile_.patches(); ++j) {
    for (int c = 0; c < profile_.input_width; ++c) tokens(j + 1, c) = frame.at(0, j, c);
  }
  return tokens;
}

ag::Var SyntheticSpatialEncoder::attention_stack(ag::Tape& tape, ag::Var tokens) const {
  if (tape.value(tokens).cols() != profile_.input_width) {
    throw ContractError("synthetic encoder: token width mismatch");
  }
  const ag::Var q = tape.matmul(tokens, tape.frozen(wq_));
  const ag::Var k = tape.matmul(tokens, tape.frozen(wk_));
  const ag::Var scores =
      tape.scale(tape.matmul_bt(q, k), 1.0 / std::sqrt(double(profile_.input_width)));
  const ag::Var mixed = tape.matmul(tape.softmax_rows(scores), tokens);
  return tape.matmul(tape.add(tokens, mixed), tape.frozen(wo_));
}

SyntheticEncoderSuite::SyntheticEncoderSuite(const SyntheticOptions& options)
    : options_(options) {
  const int c = options.num_classes;
  const int d = options.model_width;
  if (c < 2) throw ConfigError("synthetic suite: need at least two classes");
  if (options.foreground_patches < 0 || options.foreground_patches >= options.tokens - 1) {
    throw ConfigError("synthetic suite: foreground patches must leave at least one background patch");
  }
  Rng rng(derive_seed(options.seed, {hash_string("anchors")}));
  marker_ = RowVector::Zero(d);
  if (c + 1 <= d - 1) {
    // Orthonormal anchors and marker inside the complement of the ones vector.
    Matrix g = normal_matrix(rng, d, c + 1);
    for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j).array() -= g.col(j).mean();
    const Matrix q = orthonormal_columns(g);
    anchors_ = q.leftCols(c).transpose();
    marker_ = q.col(c).transpose();
  } else if (c <= d) {
    anchors_ = orthonormal_columns(normal_matrix(rng, d, c)).transpose();
  } else {
    // More classes than dimensions: rejection sampling on the centred sphere.
    const double bound = 0.75;
    anchors_.resize(c, d);
    int filled = 0;
    for (int attempt = 0; filled < c; ++attempt) {
      if (attempt > 100000) throw ConfigError("synthetic suite: cannot separate anchors");
      RowVector v = centered_unit(normal_matrix(rng, 1, d).row(0));
      bool ok = true;
      for (int i = 0; i < filled && ok; ++i) ok = anchors_.row(i).dot(v) <= bound;
      if (ok) anchors_.row(filled++) = v;
    }
  }
  theta_min_ = std::acos(std::clamp(max_pairwise_cosine(anchors_), -1.0, 1.0));
  sigma_ = options.sigma >= 0 ? options.sigma : options.sigma_fraction * sigma_star();

  Rng crng(derive_seed(options.seed, {hash_string("confusers")}));
  for (int k = 0; k < c; ++k) {
    ClassId other = static_cast<ClassId>(uniform_index(crng, std::uint64_t(c - 1)));
    if (other >= k) ++other;
    confusers_.push_back(other);
  }

  std::map<std::string, RowVector> table;
  for (int k = 0; k < c; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "class_%02d", k);
    names_.emplace_back(buf);
    table.emplace(render_template(options.text_template, names_.back()), anchors_.row(k));
  }
  spatial_ = std::make_unique<SyntheticSpatialEncoder>(
      options.tokens, options.input_width, options.model_width, options.attention_gain,
      options.seed);
  text_ = std::make_unique<LookupTextEncoder>(d, options.seed, std::move(table));
}

VideoSample SyntheticEncoderSuite::make_sample(ClassId c, int frames, std::uint64_t sample_seed,
                                               double noise) const {
  if (c < 0 || c >= num_classes()) throw InputError("synthetic: class out of range");
  if (frames < 1) throw InputError("synthetic: need at least one frame");
  const double s = noise >= 0 ? noise : sigma_;
  const int d = options_.model_width;
  const int patches = options_.tokens - 1;
  const int fg = options_.foreground_patches;
  const int bg = patches - fg;
  const RowVector anchor = anchors_.row(c);
  const RowVector toward = anchors_.row(confuser(c)) - anchor;
  const RowVector dir = toward / toward.norm();
  const Matrix& wo = spatial_->output_projection();

  Rng rng(sample_seed);
  const double z = -std::log(1.0 - uniform01(rng));
  const double unit = 1.0 / std::sqrt(double(d));

  VideoSample sample;
  sample.label = c;
  for (int t = 0; t < frames; ++t) {
    const RowVector mean = anchor + s * (z * dir + normal_matrix(rng, 1, d, unit).row(0));
    Matrix feats(patches, d);
    for (int j = 0; j < fg; ++j) {
      feats.row(j) = anchor + options_.marker_strength * marker_ +
                     0.1 * s * normal_matrix(rng, 1, d, unit).row(0);
    }
    Matrix jitter = s * normal_matrix(rng, bg, d, unit);
    jitter.rowwise() -= jitter.colwise().mean();
    const RowVector fg_sum = fg > 0 ? RowVector(feats.topRows(fg).colwise().sum()) : RowVector::Zero(d);
    const RowVector base = (patches * mean - fg_sum) / double(bg);
    for (int j = 0; j < bg; ++j) feats.row(fg + j) = base + jitter.row(j);

    const Matrix pixels = feats * wo.transpose();
    Frame f(1, patches, options_.input_width);
    for (int j = 0; j < patches; ++j)
      for (int k = 0; k < options_.input_width; ++k) f.at(0, j, k) = static_cast<float>(pixels(j, k));
    sample.frames.push_back(std::move(f));
  }
  return sample;
}

}  // namespace vcl
