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

// Corpus-level translation metrics over whitespace-tokenized sentences. All
// rates are percentages; one reference per hypothesis.

#include <cstddef>
#include <string>
#include <vector>

#include "gamt/corpus.hpp"

namespace gamt {

using Corpus = std::vector<Sentence>;

// Unit-cost Levenshtein distance over tokens.
std::size_t edit_distance(const Sentence& a, const Sentence& b);
// max(0, |hyp| - |ref|) + |ref| - bag matches.
std::size_t per_errors(const Sentence& hyp, const Sentence& ref);

inline constexpr std::size_t kMaxShiftLength = 10;
inline constexpr std::size_t kMaxShiftDistance = 10;

// Greedy block shifts (each costing one edit) while a shift lowers the
// remaining edit distance by more than its cost, then the final distance.
std::size_t ter_edits(const Sentence& hyp, const Sentence& ref);

// Clipped n-gram precisions up to max_n, geometric mean, brevity penalty.
// No smoothing: 0 when any precision is 0 or the hypotheses are empty.
double bleu(const Corpus& hyps, const Corpus& refs, std::size_t max_n = 4);
double accuracy(const Corpus& hyps, const Corpus& refs);
double wer(const Corpus& hyps, const Corpus& refs);
double per(const Corpus& hyps, const Corpus& refs);
double ter(const Corpus& hyps, const Corpus& refs);

struct MetricReport {
  double bleu = 0.0;
  double accuracy = 0.0;
  double wer = 0.0;
  double per = 0.0;
  double ter = 0.0;
  std::size_t sentences = 0;
  std::size_t hyp_tokens = 0;
  std::size_t ref_tokens = 0;
};

MetricReport evaluate(const Corpus& hyps, const Corpus& refs);
MetricReport evaluate_files(const std::string& hyp_path, const std::string& ref_path);

// Round half to even at two decimals, rendered with exactly two decimals.
std::string format_metric(double value);

}  // namespace gamt
