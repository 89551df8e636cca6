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

#include "gamt/objective.hpp"

#include <cmath>

#include "gamt/error.hpp"

namespace gamt {

namespace {

std::string dims(std::size_t r, std::size_t c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

double penalty_scale(std::size_t rows, std::size_t cols, double omega) {
  return omega / (2.0 * static_cast<double>(rows + cols));
}

}  // namespace

void LossConfig::validate() const {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be >= 0");
}

Var guided_penalty(const AlignmentMatrix& reference, Var attention, double omega) {
  const Tensor& a = attention.value();
  if (a.rank() != 2 || a.rows() != reference.rows() || a.cols() != reference.cols()) {
    throw ContractError("guided_penalty: alignment " + dims(reference.rows(), reference.cols()) +
                        " vs attention " + shape_string(a.shape()));
  }
  Var m = attention.tape()->constant(reference.to_tensor());
  return scale(sum(abs(sub(m, attention))),
               penalty_scale(reference.rows(), reference.cols(), omega));
}

double guided_penalty_value(const AlignmentMatrix& reference, const AlignmentMatrix& attention,
                            double omega) {
  if (reference.rows() != attention.rows() || reference.cols() != attention.cols()) {
    throw ContractError("guided_penalty: alignment " + dims(reference.rows(), reference.cols()) +
                        " vs attention " + dims(attention.rows(), attention.cols()));
  }
  double total = 0.0;
  const auto m = reference.values();
  const auto a = attention.values();
  for (std::size_t k = 0; k < m.size(); ++k) total += std::fabs(m[k] - a[k]);
  return total * penalty_scale(reference.rows(), reference.cols(), omega);
}

Loss total_loss(const ModelGraph& graph, const SentencePair& pair,
                const AlignmentMatrix* reference, const LossConfig& config) {
  config.validate();
  if (config.guided && reference == nullptr) {
    throw ConfigError("guided loss requires an alignment matrix for every pair");
  }
  Loss loss{{}, {}, std::nullopt, forward_teacher_forced(graph, pair)};
  loss.nll = loss.forward.nll;
  if (!config.guided) {
    loss.total = loss.nll;
    return loss;
  }
  loss.penalty = guided_penalty(*reference, loss.forward.attention_var(pair.target.size()),
                                config.omega);
  loss.total = add(loss.nll, *loss.penalty);
  return loss;
}

}  // namespace gamt
