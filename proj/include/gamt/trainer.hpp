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

// Minibatch SGD with global-norm clipping and patience-based learning-rate
// decay driven by dev-set negative log-likelihood.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "gamt/aligner.hpp"
#include "gamt/model.hpp"
#include "gamt/objective.hpp"

namespace gamt {

struct TrainConfig {
  double lr0 = 0.5;
  double decay_factor = 0.5;
  std::size_t patience = 3;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::size_t eval_every = 50;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;

  void validate() const;
};

struct TrainState {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double lr = 0.5;
  std::size_t decays = 0;
  std::deque<double> window;  // dev losses since the last decay, at most `patience`
  double best_dev = std::numeric_limits<double>::infinity();

  static TrainState initial(const TrainConfig& config);
};

// Records `dev_loss`; when `patience` losses have been seen since the last
// decay and `dev_loss` is no better than the best of them, multiplies lr by
// the decay factor and empties the window instead. Returns true on decay.
bool maybe_decay(TrainState& state, double dev_loss, const TrainConfig& config);

// p <- p - lr * g after rescaling g to global norm `clip_norm` when it is
// larger (clip_norm <= 0 disables clipping). Returns true when clipping fired.
// Throws TrainingError naming the first non-finite gradient entry.
bool sgd_step(ParameterStore& params, Gradients& grads, double lr, double clip_norm,
              std::size_t step = 0);

// Mean of total_loss over `pairs[indices]`; gradients of that mean are added
// into `grads`. `alignments` is indexed like `pairs` and only read when guided.
double batch_loss(const ModelState& state, const std::vector<SentencePair>& pairs,
                  std::span<const std::size_t> indices,
                  const std::vector<AlignmentMatrix>* alignments, const LossConfig& loss,
                  Gradients* grads);

// Summed nll over all pairs divided by the number of predicted tokens (EOS
// included).
double nll_per_token(const ModelState& state, const std::vector<SentencePair>& pairs);

struct LogRow {
  std::size_t step = 0;
  double train_loss = 0.0;  // mean batch loss since the previous row
  double dev_loss = 0.0;
  double lr = 0.0;          // after the decay decision
};

void write_log(std::ostream& out, const std::vector<LogRow>& rows);

struct TrainHooks {
  // Called whenever the dev loss reaches a new minimum.
  std::function<void(const ModelState&, const TrainState&)> on_improvement;
  // Called after every epoch; returning false stops training.
  std::function<bool(const ModelState&, const TrainState&)> on_epoch_end;
};

struct TrainResult {
  ModelState state;
  TrainState train_state;
  std::vector<LogRow> log;
  std::size_t clipped_steps = 0;
};

// Trains `model` on `train`, evaluating nll_per_token on `dev` every
// `eval_every` steps and once more after the final step. An empty dev set
// falls back to the training pairs. Guided mode needs one alignment per
// training pair.
TrainResult train(const std::vector<SentencePair>& train, const std::vector<SentencePair>& dev,
                  ModelState model, const LossConfig& loss, const TrainConfig& config,
                  const std::vector<AlignmentMatrix>* alignments = nullptr,
                  const TrainHooks& hooks = {});

}  // namespace gamt
