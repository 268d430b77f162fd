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
#include "vcl/core/text_bank.hpp"

#include <span>

namespace vcl {

struct MclPrediction {
  ClassId class_id = -1;
  int row = -1;       // bank row of the prediction
  RowVector logits;   // one per bank row, cosine / temperature
};

/// Multi-modal contrastive classifier: cosine similarity between a video
/// embedding and every text row, divided by the temperature. Holds no
/// class-specific parameters.
class MclHead {
 public:
  MclHead(const TextClassBank& bank, double temperature);

  const TextClassBank& bank() const { return *bank_; }
  double temperature() const { return temperature_; }

  /// Throws ClassificationError for a zero-norm or non-finite embedding.
  MclPrediction classify(const RowVector& v) const;

 private:
  const TextClassBank* bank_;
  double temperature_;
};

/// Argmax over cos(v, row) / temperature; ties go to the lowest class id.
MclPrediction mcl_classify(const RowVector& v, const TextClassBank& bank, double temperature);

/// Logits 1 x M for an embedding on the tape.
ag::Var mcl_logits(ag::Tape& tape, ag::Var v, const TextClassBank& bank, double temperature);

/// Cross-entropy of the logits against the label's bank row. Throws
/// ContractError when the label is absent from the bank.
ag::Var mcl_sample_loss(ag::Tape& tape, ag::Var v, ClassId label, const TextClassBank& bank,
                        double temperature);

/// Mean cross-entropy over a batch of embeddings (one per row).
double mcl_loss(const Matrix& embeddings, std::span<const ClassId> labels,
                const TextClassBank& bank, double temperature);

}  // namespace vcl
