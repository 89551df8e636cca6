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

// Attention encoder-decoder: stacked GRU encoder, additive attention over the
// top-layer annotations, stacked GRU decoder fed with [embed(y_prev); c], and
// an output layer over [s_i; c_i; embed(y_prev)].
//
// Row-vector convention: a layer maps x[1 x in] to x * W[in x out] + b[1 x out].

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gamt/aligner.hpp"
#include "gamt/autodiff.hpp"
#include "gamt/corpus.hpp"

namespace gamt {

struct ModelConfig {
  std::size_t num_layers = 1;
  std::size_t hidden_size = 64;
  std::size_t embed_size = 32;
  std::size_t src_vocab_size = 0;
  std::size_t tgt_vocab_size = 0;
  double max_decode_factor = 2.0;
  std::uint64_t seed = 1;

  void validate() const;
  // ceil(max_decode_factor * source_length) + 5
  std::size_t max_decode_length(std::size_t source_length) const;
};

struct ParameterSpec {
  std::string name;
  Shape shape;
};

// Every parameter name and shape, in storage order, as a function of the config.
std::vector<ParameterSpec> parameter_specs(const ModelConfig& config);

inline constexpr double kInitRange = 0.08;

class ModelState {
 public:
  // Parameters drawn uniformly from [-kInitRange, kInitRange) using config.seed.
  explicit ModelState(const ModelConfig& config);
  static ModelState zeros(const ModelConfig& config);
  // Takes ownership of an externally built store; names and shapes must match
  // parameter_specs(config) exactly.
  ModelState(const ModelConfig& config, ParameterStore params);

  const ModelConfig& config() const { return config_; }
  const ParameterStore& params() const { return params_; }
  ParameterStore& params() { return params_; }

  bool all_finite() const;

 private:
  ModelConfig config_;
  ParameterStore params_;
};

// Per-layer hidden states; back() is the top layer.
using LayerStates = std::vector<Var>;

struct Encoded {
  std::vector<Var> annotations;  // top-layer h_1..h_S, each 1 x hidden
  Var stacked;                   // S x hidden
  std::vector<Var> keys;         // h_j * U_a, each 1 x hidden
  LayerStates final_states;      // last position, every layer
};

struct AttentionStep {
  Var energies;  // 1 x S
  Var weights;   // 1 x S, softmax of energies
  Var context;   // 1 x hidden
};

struct DecoderStep {
  LayerStates states;
  Var logits;  // 1 x tgt_vocab
};

// Binds a model's parameters onto a tape and records the network on it.
class ModelGraph {
 public:
  ModelGraph(Tape& tape, const ModelState& state);

  Encoded encode(std::span<const std::size_t> source) const;
  AttentionStep attend(Var previous_state, const Encoded& encoded) const;
  DecoderStep decode_step(std::size_t previous_token, const LayerStates& previous,
                          Var context) const;
  LayerStates initial_decoder_states(const Encoded& encoded) const;

  Tape& tape() const { return *tape_; }
  const ModelConfig& config() const { return *config_; }

 private:
  struct Gru {
    Var w_z, w_r, w_n, u_z, u_r, u_n, b_z, b_r, b_n;
  };

  Var gru_step(const Gru& cell, Var input, Var hidden) const;

  Tape* tape_;
  const ModelConfig* config_;
  Var src_embed_, tgt_embed_;
  std::vector<Gru> encoder_, decoder_;
  Var att_w_, att_u_, att_v_;
  Var out_w_, out_b_;
  Var zero_state_;
};

struct TeacherForced {
  Var nll;                            // -sum log p(y_i | y_<i, x), EOS included
  std::vector<Var> attention_rows;    // T + 1 rows of 1 x S
  std::size_t source_length = 0;

  // All T + 1 rows, as values.
  AlignmentMatrix attention() const;
  // First `rows` attention rows as one tape node (rows x S).
  Var attention_var(std::size_t rows) const;
};

TeacherForced forward_teacher_forced(const ModelGraph& graph, const SentencePair& pair);

struct Hypothesis {
  TokenIds tokens;            // without BOS/EOS
  bool finished = false;      // produced EOS
  bool truncated = false;     // hit the length limit first
  double log_prob = 0.0;      // includes the EOS step when finished
  std::size_t scored_steps = 0;
  std::vector<Tensor> attention;  // one 1 x S row per scored step

  double score() const;  // log_prob / scored_steps
  AlignmentMatrix attention_matrix() const;
};

// Token ids that decoding never emits.
bool decodable(std::size_t token);

Hypothesis greedy_decode(const ModelState& state, std::span<const std::size_t> source,
                         std::size_t max_length);
Hypothesis greedy_decode(const ModelState& state, std::span<const std::size_t> source);

// Length-normalized beam search. The greedy hypothesis always competes in the
// final ranking, so the returned score is never below the greedy score.
Hypothesis beam_decode(const ModelState& state, std::span<const std::size_t> source,
                       std::size_t beam, std::size_t max_length);
Hypothesis beam_decode(const ModelState& state, std::span<const std::size_t> source,
                       std::size_t beam);

// Log-probability of emitting `target` then EOS, scored the way decoding does.
double sequence_log_prob(const ModelState& state, std::span<const std::size_t> source,
                         std::span<const std::size_t> target, bool with_eos);

}  // namespace gamt
