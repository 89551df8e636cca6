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

// Desk-scale comparison driver: a synthetic Persian-script parallel corpus
// and the 2x2 {preprocessing, guided loss} arms trained under one seed.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gamt/metrics.hpp"
#include "gamt/run_config.hpp"
#include "gamt/trainer.hpp"

namespace gamt {

struct SyntheticOptions {
  std::size_t pairs = 500;
  std::size_t word_types = 24;
  std::size_t min_length = 3;
  std::size_t max_length = 8;
  // Probability that two adjacent source words are joined by ZWNJ instead of
  // a space, and that the final period is attached to the last word.
  double noise = 0.3;
  // Probability of swapping each adjacent target pair (local reordering).
  double swap_rate = 0.0;
  std::uint64_t seed = 1;
};

// Raw source lines in Persian script and tokenized target lines. Source word k
// always translates to target word "w<k>"; both sides end with ".".
struct RawParallel {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

RawParallel make_synthetic(const SyntheticOptions& options);

// Monotone reference for a T x S pair: row i links to column
// floor((i + 0.5) * S / T). The identity when T == S.
AlignmentMatrix diagonal_alignment(std::size_t target_length, std::size_t source_length);

struct AttentionStats {
  double mean_l1 = 0.0;         // mean over target rows of sum_j |A_ij - D_ij|
  double argmax_agreement = 0.0;  // share of rows whose argmax is the diagonal link
};

// Teacher-forced attention (EOS row excluded) against diagonal_alignment.
AttentionStats attention_stats(const ModelState& state, const std::vector<SentencePair>& pairs);

struct Arm {
  std::string name;
  bool preprocess = false;
  bool guided = false;
};

// baseline, +preprocessing, +guided, +preprocessing+guided.
std::vector<Arm> standard_arms();

struct ArmResult {
  Arm arm;
  MetricReport metrics;
  AttentionStats attention;        // on the test pairs
  AttentionStats train_attention;  // on the training pairs
  std::vector<LogRow> log;
  std::vector<std::string> hypotheses;
  ModelState state;
};

// Splits data into train / dev / test (the last two each `test_fraction` of
// the pairs, taken from the end), preprocesses the source side when the arm
// asks for it, trains, decodes the test sources and scores them. Guided arms
// use Model 1 Viterbi links (`alignment = model1`, `auto_align` iterations, 5
// when unset) or diagonal_alignment (`alignment = diagonal`).
ArmResult run_arm(const RawParallel& data, const Arm& arm, const RunConfig& config);

// Runs the arms in order, writing <out>/report.tsv, <out>/attention_stats.tsv,
// <out>/resolved.conf and per-arm logs and hypotheses. Rows are flushed as
// each arm finishes so a failure keeps earlier results.
std::vector<ArmResult> run_experiment(const RawParallel& data, const std::vector<Arm>& arms,
                                      const RunConfig& config, const std::string& out_dir);

}  // namespace gamt
