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

#include "gamt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gamt/error.hpp"
#include "gamt/random.hpp"

namespace gamt {

// ---------------------------------------------------------------------------
// Config and parameters

void ModelConfig::validate() const {
  if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
  if (hidden_size < 1) throw ConfigError("hidden_size must be >= 1");
  if (embed_size < 1) throw ConfigError("embed_size must be >= 1");
  if (src_vocab_size <= Vocabulary::kReserved || tgt_vocab_size <= Vocabulary::kReserved) {
    throw ConfigError("vocabulary sizes must exceed the " +
                      std::to_string(Vocabulary::kReserved) + " reserved ids");
  }
  if (!(max_decode_factor > 0.0) || !std::isfinite(max_decode_factor)) {
    throw ConfigError("max_decode_factor must be positive");
  }
}

std::size_t ModelConfig::max_decode_length(std::size_t source_length) const {
  return static_cast<std::size_t>(std::ceil(max_decode_factor * static_cast<double>(source_length))) +
         5;
}

std::vector<ParameterSpec> parameter_specs(const ModelConfig& c) {
  const std::size_t H = c.hidden_size, E = c.embed_size;
  std::vector<ParameterSpec> specs;
  specs.push_back({"src_embed", {c.src_vocab_size, E}});
  specs.push_back({"tgt_embed", {c.tgt_vocab_size, E}});
  auto gru = [&](const std::string& prefix, std::size_t input) {
    for (const char* g : {"z", "r", "n"}) specs.push_back({prefix + ".W_" + g, {input, H}});
    for (const char* g : {"z", "r", "n"}) specs.push_back({prefix + ".U_" + g, {H, H}});
    for (const char* g : {"z", "r", "n"}) specs.push_back({prefix + ".b_" + g, {1, H}});
  };
  for (std::size_t l = 0; l < c.num_layers; ++l) {
    gru("encoder." + std::to_string(l), l == 0 ? E : H);
  }
  for (std::size_t l = 0; l < c.num_layers; ++l) {
    gru("decoder." + std::to_string(l), l == 0 ? E + H : H);
  }
  specs.push_back({"attention.W", {H, H}});
  specs.push_back({"attention.U", {H, H}});
  specs.push_back({"attention.v", {H, 1}});
  specs.push_back({"output.W", {H + H + E, c.tgt_vocab_size}});
  specs.push_back({"output.b", {1, c.tgt_vocab_size}});
  return specs;
}

ModelState::ModelState(const ModelConfig& config) : config_(config) {
  config_.validate();
  Rng rng(config_.seed);
  for (auto& spec : parameter_specs(config_)) {
    std::size_t n = 1;
    for (auto d : spec.shape) n *= d;
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-kInitRange, kInitRange);
    params_.add(spec.name, Tensor(spec.shape, std::move(v)));
  }
}

ModelState ModelState::zeros(const ModelConfig& config) {
  config.validate();
  ParameterStore store;
  for (auto& spec : parameter_specs(config)) store.add(spec.name, Tensor::zeros(spec.shape));
  return ModelState(config, std::move(store));
}

ModelState::ModelState(const ModelConfig& config, ParameterStore params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  const auto specs = parameter_specs(config_);
  if (specs.size() != params_.size()) {
    throw FormatError("expected " + std::to_string(specs.size()) + " parameters, got " +
                      std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (params_.name(i) != specs[i].name || params_.value(i).shape() != specs[i].shape) {
      throw FormatError("parameter " + std::to_string(i) + " is " + params_.name(i) + " " +
                        shape_string(params_.value(i).shape()) + ", expected " + specs[i].name +
                        " " + shape_string(specs[i].shape));
    }
  }
}

bool ModelState::all_finite() const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_.value(i).all_finite()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Graph

ModelGraph::ModelGraph(Tape& tape, const ModelState& state)
    : tape_(&tape), config_(&state.config()) {
  const ParameterStore& p = state.params();
  auto bind = [&](const std::string& name) { return tape.parameter(p, p.index(name)); };
  auto bind_gru = [&](const std::string& prefix) {
    return Gru{bind(prefix + ".W_z"), bind(prefix + ".W_r"), bind(prefix + ".W_n"),
               bind(prefix + ".U_z"), bind(prefix + ".U_r"), bind(prefix + ".U_n"),
               bind(prefix + ".b_z"), bind(prefix + ".b_r"), bind(prefix + ".b_n")};
  };
  src_embed_ = bind("src_embed");
  tgt_embed_ = bind("tgt_embed");
  for (std::size_t l = 0; l < config_->num_layers; ++l) {
    encoder_.push_back(bind_gru("encoder." + std::to_string(l)));
  }
  for (std::size_t l = 0; l < config_->num_layers; ++l) {
    decoder_.push_back(bind_gru("decoder." + std::to_string(l)));
  }
  att_w_ = bind("attention.W");
  att_u_ = bind("attention.U");
  att_v_ = bind("attention.v");
  out_w_ = bind("output.W");
  out_b_ = bind("output.b");
  zero_state_ = tape.constant(Tensor::zeros({1, config_->hidden_size}));
}

Var ModelGraph::gru_step(const Gru& g, Var x, Var h) const {
  Var z = sigmoid(add(add(matmul(x, g.w_z), matmul(h, g.u_z)), g.b_z));
  Var r = sigmoid(add(add(matmul(x, g.w_r), matmul(h, g.u_r)), g.b_r));
  Var n = tanh(add(add(matmul(x, g.w_n), matmul(mul(r, h), g.u_n)), g.b_n));
  // (1 - z) * n + z * h
  return add(n, mul(z, sub(h, n)));
}

Encoded ModelGraph::encode(std::span<const std::size_t> source) const {
  if (source.empty()) throw ContractError("encode: empty source sentence");
  for (auto id : source) {
    if (id >= config_->src_vocab_size) {
      throw IndexError("source id " + std::to_string(id) + " out of range for vocabulary of " +
                       std::to_string(config_->src_vocab_size));
    }
  }
  const std::size_t L = config_->num_layers;
  LayerStates states(L, zero_state_);
  Encoded out;
  for (std::size_t j = 0; j < source.size(); ++j) {
    Var input = gather_rows(src_embed_, source.subspan(j, 1));
    for (std::size_t l = 0; l < L; ++l) {
      states[l] = gru_step(encoder_[l], input, states[l]);
      input = states[l];
    }
    out.annotations.push_back(states.back());
    out.keys.push_back(matmul(states.back(), att_u_));
  }
  out.stacked = concat_rows(out.annotations);
  out.final_states = states;
  return out;
}

LayerStates ModelGraph::initial_decoder_states(const Encoded& encoded) const {
  return encoded.final_states;
}

AttentionStep ModelGraph::attend(Var previous_state, const Encoded& encoded) const {
  if (encoded.annotations.empty()) throw ContractError("attend: no annotations");
  Var query = matmul(previous_state, att_w_);
  std::vector<Var> energies;
  energies.reserve(encoded.keys.size());
  for (const Var& key : encoded.keys) energies.push_back(matmul(tanh(add(query, key)), att_v_));
  AttentionStep step;
  step.energies = concat_cols(energies);
  step.weights = softmax_row(step.energies);
  step.context = matmul(step.weights, encoded.stacked);
  return step;
}

DecoderStep ModelGraph::decode_step(std::size_t previous_token, const LayerStates& previous,
                                    Var context) const {
  if (previous.size() != config_->num_layers) {
    throw DimensionError("decode_step: expected " + std::to_string(config_->num_layers) +
                         " layer states, got " + std::to_string(previous.size()));
  }
  const std::size_t ids[1] = {previous_token};
  Var embedded = gather_rows(tgt_embed_, ids);
  const Var first_input[2] = {embedded, context};
  Var input = concat_cols(first_input);
  DecoderStep step;
  step.states.reserve(previous.size());
  for (std::size_t l = 0; l < previous.size(); ++l) {
    input = gru_step(decoder_[l], input, previous[l]);
    step.states.push_back(input);
  }
  const Var features[3] = {step.states.back(), context, embedded};
  step.logits = add(matmul(concat_cols(features), out_w_), out_b_);
  return step;
}

// ---------------------------------------------------------------------------
// Teacher forcing

AlignmentMatrix TeacherForced::attention() const {
  AlignmentMatrix m(attention_rows.size(), source_length);
  for (std::size_t i = 0; i < attention_rows.size(); ++i) {
    const auto row = attention_rows[i].value().data();
    for (std::size_t j = 0; j < source_length; ++j) m.set(i, j, row[j]);
  }
  return m;
}

Var TeacherForced::attention_var(std::size_t rows) const {
  if (rows == 0 || rows > attention_rows.size()) {
    throw DimensionError("attention_var: requested " + std::to_string(rows) + " of " +
                         std::to_string(attention_rows.size()) + " rows");
  }
  return concat_rows(std::span<const Var>(attention_rows.data(), rows));
}

namespace {

Var pick(Tape& tape, Var log_probs, std::size_t index) {
  const std::size_t n = log_probs.value().size();
  std::vector<double> onehot(n, 0.0);
  onehot.at(index) = 1.0;
  return sum(mul(log_probs, tape.constant(Tensor({1, n}, std::move(onehot)))));
}

}  // namespace

TeacherForced forward_teacher_forced(const ModelGraph& graph, const SentencePair& pair) {
  if (pair.source.empty() || pair.target.empty()) {
    throw ContractError("forward_teacher_forced: both sides must be non-empty");
  }
  Tape& tape = graph.tape();
  const Encoded enc = graph.encode(pair.source);
  LayerStates states = graph.initial_decoder_states(enc);
  TeacherForced out;
  out.source_length = pair.source.size();
  std::vector<Var> picked;
  std::size_t previous = Vocabulary::kBos;
  for (std::size_t i = 0; i <= pair.target.size(); ++i) {
    const std::size_t gold = i < pair.target.size() ? pair.target[i] : Vocabulary::kEos;
    if (gold >= graph.config().tgt_vocab_size) {
      throw IndexError("target id " + std::to_string(gold) + " out of range for vocabulary of " +
                       std::to_string(graph.config().tgt_vocab_size));
    }
    AttentionStep att = graph.attend(states.back(), enc);
    DecoderStep step = graph.decode_step(previous, states, att.context);
    picked.push_back(pick(tape, log_softmax_row(step.logits), gold));
    out.attention_rows.push_back(att.weights);
    states = std::move(step.states);
    previous = gold;
  }
  out.nll = scale(sum(concat_cols(picked)), -1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

double Hypothesis::score() const {
  return scored_steps == 0 ? -std::numeric_limits<double>::infinity()
                           : log_prob / static_cast<double>(scored_steps);
}

AlignmentMatrix Hypothesis::attention_matrix() const {
  if (attention.empty()) return {};
  AlignmentMatrix m(attention.size(), attention.front().size());
  for (std::size_t i = 0; i < attention.size(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) m.set(i, j, attention[i][j]);
  }
  return m;
}

bool decodable(std::size_t token) {
  return token != Vocabulary::kPad && token != Vocabulary::kBos;
}

namespace {

struct BeamEntry {
  Hypothesis hyp;
  LayerStates states;
  std::size_t previous = Vocabulary::kBos;
};

// Runs attention + one decoder step and returns log-probabilities.
std::vector<double> step_log_probs(const ModelGraph& graph, const Encoded& enc, BeamEntry& entry,
                                   LayerStates& next_states, Tensor& weights) {
  AttentionStep att = graph.attend(entry.states.back(), enc);
  DecoderStep step = graph.decode_step(entry.previous, entry.states, att.context);
  Var lp = log_softmax_row(step.logits);
  next_states = std::move(step.states);
  weights = att.weights.value();
  return {lp.value().data().begin(), lp.value().data().end()};
}

}  // namespace

Hypothesis greedy_decode(const ModelState& state, std::span<const std::size_t> source,
                         std::size_t max_length) {
  Tape tape;
  ModelGraph graph(tape, state);
  const Encoded enc = graph.encode(source);
  BeamEntry entry{{}, graph.initial_decoder_states(enc), Vocabulary::kBos};
  for (std::size_t t = 0; t < max_length; ++t) {
    LayerStates next;
    Tensor weights;
    const auto lp = step_log_probs(graph, enc, entry, next, weights);
    std::size_t best = lp.size();
    for (std::size_t v = 0; v < lp.size(); ++v) {
      if (decodable(v) && (best == lp.size() || lp[v] > lp[best])) best = v;
    }
    entry.hyp.log_prob += lp[best];
    entry.hyp.scored_steps++;
    entry.hyp.attention.push_back(std::move(weights));
    if (best == Vocabulary::kEos) {
      entry.hyp.finished = true;
      return entry.hyp;
    }
    entry.hyp.tokens.push_back(best);
    entry.states = std::move(next);
    entry.previous = best;
  }
  entry.hyp.truncated = true;
  return entry.hyp;
}

Hypothesis greedy_decode(const ModelState& state, std::span<const std::size_t> source) {
  return greedy_decode(state, source, state.config().max_decode_length(source.size()));
}

Hypothesis beam_decode(const ModelState& state, std::span<const std::size_t> source,
                       std::size_t beam, std::size_t max_length) {
  if (beam < 1) throw ContractError("beam width must be >= 1");
  Tape tape;
  ModelGraph graph(tape, state);
  const Encoded enc = graph.encode(source);
  std::vector<BeamEntry> active;
  active.push_back({{}, graph.initial_decoder_states(enc), Vocabulary::kBos});
  std::vector<Hypothesis> complete;

  struct Candidate {
    double total;
    std::size_t from;
    std::size_t token;
  };
  for (std::size_t t = 0; t < max_length && !active.empty(); ++t) {
    std::vector<LayerStates> next_states(active.size());
    std::vector<Tensor> weights(active.size());
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < active.size(); ++h) {
      const auto lp = step_log_probs(graph, enc, active[h], next_states[h], weights[h]);
      for (std::size_t v = 0; v < lp.size(); ++v) {
        if (decodable(v)) candidates.push_back({active[h].hyp.log_prob + lp[v], h, v});
      }
    }
    const std::size_t keep = std::min(beam, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                        if (a.total != b.total) return a.total > b.total;
                        if (a.from != b.from) return a.from < b.from;
                        return a.token < b.token;
                      });
    std::vector<BeamEntry> next;
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& c = candidates[k];
      BeamEntry e{active[c.from].hyp, next_states[c.from], c.token};
      e.hyp.log_prob = c.total;
      e.hyp.scored_steps++;
      e.hyp.attention.push_back(weights[c.from]);
      if (c.token == Vocabulary::kEos) {
        e.hyp.finished = true;
        complete.push_back(std::move(e.hyp));
      } else {
        e.hyp.tokens.push_back(c.token);
        next.push_back(std::move(e));
      }
    }
    active = std::move(next);
  }
  for (auto& e : active) {
    e.hyp.truncated = true;
    complete.push_back(std::move(e.hyp));
  }

  Hypothesis best = greedy_decode(state, source, max_length);
  for (auto& h : complete) {
    if (h.score() > best.score()) best = std::move(h);
  }
  return best;
}

Hypothesis beam_decode(const ModelState& state, std::span<const std::size_t> source,
                       std::size_t beam) {
  return beam_decode(state, source, beam, state.config().max_decode_length(source.size()));
}

double sequence_log_prob(const ModelState& state, std::span<const std::size_t> source,
                         std::span<const std::size_t> target, bool with_eos) {
  Tape tape;
  ModelGraph graph(tape, state);
  const Encoded enc = graph.encode(source);
  LayerStates states = graph.initial_decoder_states(enc);
  std::size_t previous = Vocabulary::kBos;
  double total = 0.0;
  const std::size_t steps = target.size() + (with_eos ? 1 : 0);
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t gold = i < target.size() ? target[i] : Vocabulary::kEos;
    AttentionStep att = graph.attend(states.back(), enc);
    DecoderStep step = graph.decode_step(previous, states, att.context);
    total += log_softmax_row(step.logits).value()[gold];
    states = std::move(step.states);
    previous = gold;
  }
  return total;
}

}  // namespace gamt
