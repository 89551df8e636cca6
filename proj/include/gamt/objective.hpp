// Copyright 2026 The GAMT Authors. All Rights Reserved.
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

// Training objective: sentence negative log-likelihood plus an optional
// guided-alignment penalty pulling attention weights toward a 0/1 alignment.

#include <optional>

#include "gamt/aligner.hpp"
#include "gamt/model.hpp"

namespace gamt {

struct LossConfig {
  double omega = 0.2;
  bool guided = false;

  void validate() const;
};

// omega / (2 (T + S)) * sum_ij |M_ij - A_ij| for T x S matrices. `attention`
// is a tape node; the result is differentiable with respect to it.
Var guided_penalty(const AlignmentMatrix& reference, Var attention, double omega);

// Same quantity on plain values.
double guided_penalty_value(const AlignmentMatrix& reference, const AlignmentMatrix& attention,
                            double omega);

struct Loss {
  Var total;
  Var nll;
  std::optional<Var> penalty;
  TeacherForced forward;
};

// The EOS attention row is left out of the penalty so that the compared
// matrices are both target_length x source_length.
Loss total_loss(const ModelGraph& graph, const SentencePair& pair,
                const AlignmentMatrix* reference, const LossConfig& config);

}  // namespace gamt
