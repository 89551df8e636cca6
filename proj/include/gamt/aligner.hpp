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

// IBM Model 1 word alignment trained by EM, Viterbi extraction of 0/1
// alignment matrices, and import/export of "j-i" link files.

#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gamt/corpus.hpp"
#include "gamt/tensor.hpp"

namespace gamt {

// Dense rows x cols matrix indexed [target i][source j].
class AlignmentMatrix {
 public:
  AlignmentMatrix() = default;
  AlignmentMatrix(std::size_t rows, std::size_t cols);
  static AlignmentMatrix from_tensor(const Tensor& t);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, double v) { values_[i * cols_ + j] = v; }
  std::span<const double> values() const { return values_; }

  Tensor to_tensor() const;
  // Every entry is 0 or 1 and each row has at most one 1.
  bool is_hard() const;
  // Every row is non-negative and sums to 1 within tol.
  bool is_row_stochastic(double tol = 1e-9) const;
  // (source j, target i) pairs with value 1, ordered by j then i.
  std::vector<std::pair<std::size_t, std::size_t>> links() const;

  bool operator==(const AlignmentMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// t(target | source), normalized per source word. The NULL source word uses kNull.
class TranslationTable {
 public:
  static constexpr std::size_t kNull = std::numeric_limits<std::size_t>::max();

  double prob(std::size_t target, std::size_t source) const;
  void set(std::size_t target, std::size_t source, double p) { t_[{source, target}] = p; }
  std::size_t size() const { return t_.size(); }

  // Entries keyed (source, target), ordered by source then target.
  const std::map<std::pair<std::size_t, std::size_t>, double>& entries() const { return t_; }

  void save(std::ostream& out, const Vocabulary& source_vocab,
            const Vocabulary& target_vocab) const;
  static TranslationTable load(std::istream& in, const Vocabulary& source_vocab,
                               const Vocabulary& target_vocab);

 private:
  std::map<std::pair<std::size_t, std::size_t>, double> t_;
};

// Source token written for the NULL word in table files.
inline constexpr const char* kNullToken = "NULL";

struct Model1Options {
  std::size_t iterations = 5;
  bool use_null = true;
};

struct Model1Result {
  TranslationTable table;
  // Corpus log-likelihood under the table before each iteration and after the
  // last one (iterations + 1 values).
  std::vector<double> log_likelihood;
};

// Log-likelihood of the corpus targets given sources under Model 1 with a
// uniform alignment prior (the length term is omitted).
double model1_log_likelihood(const std::vector<SentencePair>& pairs, const TranslationTable& table,
                             bool use_null = true);

TranslationTable model1_uniform_table(const std::vector<SentencePair>& pairs, bool use_null = true);

Model1Result train_model1(const std::vector<SentencePair>& pairs, const Model1Options& options);

// Posterior probability that target position i links to each source position
// (NULL last when use_null), under the given table.
std::vector<double> link_posterior(const SentencePair& pair, std::size_t i,
                                   const TranslationTable& table, bool use_null = true);

// Probability used for pairs absent from the table.
inline constexpr double kUnseenFloor = 1e-12;

// Hard alignment: each target word links to its most probable source word,
// or to nothing if NULL wins. Ties go to the smallest source index; NULL must
// be strictly better than every real position.
AlignmentMatrix viterbi_align(const SentencePair& pair, const TranslationTable& table,
                              bool use_null = true);

std::string format_links(const AlignmentMatrix& m);
// Parses one "j-i j-i ..." line into a target_len x source_len matrix.
AlignmentMatrix parse_links(std::string_view line, std::size_t source_len, std::size_t target_len,
                            std::size_t line_number);

std::vector<AlignmentMatrix> import_alignments(std::istream& in,
                                               const std::vector<SentencePair>& pairs);
std::vector<AlignmentMatrix> import_alignments(const std::string& path,
                                               const std::vector<SentencePair>& pairs);
void write_alignments(std::ostream& out, const std::vector<AlignmentMatrix>& matrices);

}  // namespace gamt
