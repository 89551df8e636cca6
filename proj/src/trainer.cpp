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

#include "gamt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "gamt/error.hpp"
#include "gamt/random.hpp"

namespace gamt {

void TrainConfig::validate() const {
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw ConfigError("lr0 must be positive");
  if (!(decay_factor > 0.0 && decay_factor < 1.0)) {
    throw ConfigError("decay_factor must lie in (0, 1)");
  }
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
  if (std::isnan(clip_norm)) throw ConfigError("clip_norm must be a number");
}

TrainState TrainState::initial(const TrainConfig& config) {
  TrainState s;
  s.lr = config.lr0;
  return s;
}

bool maybe_decay(TrainState& state, double dev_loss, const TrainConfig& config) {
  if (state.window.size() >= config.patience) {
    const double best = *std::min_element(state.window.begin(), state.window.end());
    if (dev_loss >= best) {
      state.lr *= config.decay_factor;
      ++state.decays;
      state.window.clear();
      return true;
    }
  }
  state.window.push_back(dev_loss);
  while (state.window.size() > config.patience) state.window.pop_front();
  return false;
}

bool sgd_step(ParameterStore& params, Gradients& grads, double lr, double clip_norm,
              std::size_t step) {
  if (grads.size() != params.size()) {
    throw ContractError("sgd_step: " + std::to_string(grads.size()) + " gradients for " +
                        std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads.shape(i) != params.value(i).shape()) {
      throw DimensionError("sgd_step: gradient " + shape_string(grads.shape(i)) +
                           " for parameter " + params.name(i) + " " +
                           shape_string(params.value(i).shape()));
    }
    const auto g = grads[i];
    for (std::size_t e = 0; e < g.size(); ++e) {
      if (!std::isfinite(g[e])) {
        throw TrainingError("non-finite gradient in " + params.name(i) + "[" +
                            std::to_string(e) + "] at step " + std::to_string(step));
      }
    }
  }
  bool clipped = false;
  if (clip_norm > 0.0) {
    const double norm = grads.global_norm();
    if (norm > clip_norm) {
      grads.scale(clip_norm / norm);
      clipped = true;
    }
  }
  if (lr == 0.0) return clipped;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& p = params.value(i);
    const auto g = grads[i];
    std::vector<double> next(p.data().begin(), p.data().end());
    for (std::size_t e = 0; e < next.size(); ++e) next[e] -= lr * g[e];
    params.set(i, Tensor(p.shape(), std::move(next)));
  }
  return clipped;
}

double batch_loss(const ModelState& state, const std::vector<SentencePair>& pairs,
                  std::span<const std::size_t> indices,
                  const std::vector<AlignmentMatrix>* alignments, const LossConfig& loss,
                  Gradients* grads) {
  if (indices.empty()) throw ContractError("batch_loss: empty batch");
  const double weight = 1.0 / static_cast<double>(indices.size());
  double sum = 0.0;
  for (const std::size_t k : indices) {
    const AlignmentMatrix* reference =
        loss.guided && alignments != nullptr ? &alignments->at(k) : nullptr;
    Tape tape;
    ModelGraph graph(tape, state);
    const Loss l = total_loss(graph, pairs.at(k), reference, loss);
    sum += l.total.value().item();
    if (grads != nullptr) tape.backward(l.total, *grads, weight);
  }
  return sum / static_cast<double>(indices.size());
}

double nll_per_token(const ModelState& state, const std::vector<SentencePair>& pairs) {
  double sum = 0.0;
  std::size_t tokens = 0;
  for (const auto& pair : pairs) {
    Tape tape;
    ModelGraph graph(tape, state);
    sum += forward_teacher_forced(graph, pair).nll.value().item();
    tokens += pair.target.size() + 1;
  }
  return tokens == 0 ? 0.0 : sum / static_cast<double>(tokens);
}

void write_log(std::ostream& out, const std::vector<LogRow>& rows) {
  out << "step\ttrain_loss\tdev_loss\tlr\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu\t%.10g\t%.10g\t%.10g\n", r.step, r.train_loss,
                  r.dev_loss, r.lr);
    out << buf;
  }
}

TrainResult train(const std::vector<SentencePair>& train, const std::vector<SentencePair>& dev,
                  ModelState model, const LossConfig& loss, const TrainConfig& config,
                  const std::vector<AlignmentMatrix>* alignments, const TrainHooks& hooks) {
  config.validate();
  loss.validate();
  if (train.empty()) throw InputError("training corpus is empty");
  if (loss.guided) {
    if (alignments == nullptr) throw ConfigError("guided training needs alignments");
    if (alignments->size() != train.size()) {
      throw InputError("got " + std::to_string(alignments->size()) + " alignments for " +
                       std::to_string(train.size()) + " training pairs");
    }
  }
  const auto& dev_pairs = dev.empty() ? train : dev;

  TrainResult result{std::move(model), TrainState::initial(config), {}, 0};
  ModelState& state = result.state;
  TrainState& ts = result.train_state;
  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Gradients grads(state.params());

  double window_loss = 0.0;
  std::size_t window_batches = 0;
  auto evaluate = [&] {
    const double dev_loss = nll_per_token(state, dev_pairs);
    maybe_decay(ts, dev_loss, config);
    result.log.push_back({ts.step, window_loss / static_cast<double>(window_batches), dev_loss,
                          ts.lr});
    window_loss = 0.0;
    window_batches = 0;
    if (dev_loss < ts.best_dev) {
      ts.best_dev = dev_loss;
      if (hooks.on_improvement) hooks.on_improvement(state, ts);
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    ts.epoch = epoch;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);
      grads.zero();
      const double value = batch_loss(state, train, batch, alignments, loss, &grads);
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite batch loss at step " + std::to_string(ts.step));
      }
      if (sgd_step(state.params(), grads, ts.lr, config.clip_norm, ts.step)) ++result.clipped_steps;
      ++ts.step;
      window_loss += value;
      ++window_batches;
      if (ts.step % config.eval_every == 0) evaluate();
    }
    if (hooks.on_epoch_end && !hooks.on_epoch_end(state, ts)) break;
  }
  if (window_batches > 0) evaluate();
  return result;
}

}  // namespace gamt
