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

#include "vcl/method/mcl.hpp"

#include "vcl/core/errors.hpp"

#include <cmath>

namespace vcl {

MclHead::MclHead(const TextClassBank& bank, double temperature)
    : bank_(&bank), temperature_(temperature) {
  if (!(temperature > 0)) throw ConfigError("mcl: temperature must be positive");
}

MclPrediction MclHead::classify(const RowVector& v) const {
  return mcl_classify(v, *bank_, temperature_);
}

MclPrediction mcl_classify(const RowVector& v, const TextClassBank& bank, double temperature) {
  if (bank.empty()) throw ClassificationError("mcl: empty text bank");
  if (v.size() != bank.width()) throw ContractError("mcl: embedding width mismatch");
  const double norm = v.norm();
  if (!std::isfinite(norm) || norm == 0.0) {
    throw ClassificationError("mcl: degenerate video embedding (zero or non-finite norm)");
  }
  MclPrediction out;
  // One dot product per row, independent of the bank size.
  const RowVector unit = v / norm;
  out.logits.resize(bank.size());
  for (int r = 0; r < bank.size(); ++r) {
    double dot = 0.0;
    for (Eigen::Index k = 0; k < unit.size(); ++k) dot += bank.embeddings()(r, k) * unit(k);
    out.logits(r) = dot / temperature;
  }
  const auto& ids = bank.class_ids();
  for (int r = 0; r < bank.size(); ++r) {
    if (out.row < 0 || out.logits(r) > out.logits(out.row) ||
        (out.logits(r) == out.logits(out.row) && ids[std::size_t(r)] < out.class_id)) {
      out.row = r;
      out.class_id = ids[std::size_t(r)];
    }
  }
  return out;
}

ag::Var mcl_logits(ag::Tape& tape, ag::Var v, const TextClassBank& bank, double temperature) {
  if (tape.value(v).cols() != bank.width()) throw ContractError("mcl: embedding width mismatch");
  const ag::Var unit = tape.normalize_rows(v);
  return tape.scale(tape.matmul_bt(unit, tape.constant_ref(bank.embeddings())), 1.0 / temperature);
}

ag::Var mcl_sample_loss(ag::Tape& tape, ag::Var v, ClassId label, const TextClassBank& bank,
                        double temperature) {
  const int row = bank.row_of_or(label);
  if (row < 0) throw ContractError("mcl: label " + std::to_string(label) + " is not in the bank");
  return tape.cross_entropy(mcl_logits(tape, v, bank, temperature), row);
}

double mcl_loss(const Matrix& embeddings, std::span<const ClassId> labels,
                const TextClassBank& bank, double temperature) {
  if (embeddings.rows() != Eigen::Index(labels.size()) || labels.empty()) {
    throw ContractError("mcl: need one label per embedding");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    ag::Tape tape;
    const ag::Var v = tape.constant(embeddings.row(i));
    total += tape.scalar(mcl_sample_loss(tape, v, labels[std::size_t(i)], bank, temperature));
  }
  return total / double(embeddings.rows());
}

}  // namespace vcl
