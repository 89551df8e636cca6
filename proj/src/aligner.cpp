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

#include "gamt/aligner.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "gamt/error.hpp"

namespace gamt {

// ---------------------------------------------------------------------------
// AlignmentMatrix

AlignmentMatrix::AlignmentMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

AlignmentMatrix AlignmentMatrix::from_tensor(const Tensor& t) {
  AlignmentMatrix m(t.rows(), t.cols());
  std::copy(t.data().begin(), t.data().end(), m.values_.begin());
  return m;
}

Tensor AlignmentMatrix::to_tensor() const {
  if (values_.empty()) throw DimensionError("empty alignment matrix has no tensor form");
  return Tensor({rows_, cols_}, values_);
}

bool AlignmentMatrix::is_hard() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    int ones = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      const double v = (*this)(i, j);
      if (v != 0.0 && v != 1.0) return false;
      ones += v == 1.0;
    }
    if (ones > 1) return false;
  }
  return true;
}

bool AlignmentMatrix::is_row_stochastic(double tol) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if ((*this)(i, j) < 0.0) return false;
      total += (*this)(i, j);
    }
    if (std::fabs(total - 1.0) > tol) return false;
  }
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> AlignmentMatrix::links() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if ((*this)(i, j) == 1.0) out.emplace_back(j, i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TranslationTable

double TranslationTable::prob(std::size_t target, std::size_t source) const {
  auto it = t_.find({source, target});
  return it == t_.end() ? 0.0 : it->second;
}

void TranslationTable::save(std::ostream& out, const Vocabulary& source_vocab,
                            const Vocabulary& target_vocab) const {
  char buf[64];
  for (const auto& [key, p] : t_) {
    const auto& [source, target] = key;
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << (source == kNull ? std::string(kNullToken) : source_vocab.token(source)) << '\t'
        << target_vocab.token(target) << '\t' << buf << '\n';
  }
}

TranslationTable TranslationTable::load(std::istream& in, const Vocabulary& source_vocab,
                                        const Vocabulary& target_vocab) {
  TranslationTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) {
      throw ParseError("translation table line " + std::to_string(lineno) + ": expected 3 fields");
    }
    const std::string src = line.substr(0, a);
    const std::string tgt = line.substr(a + 1, b - a - 1);
    const std::string num = line.substr(b + 1);
    char* end = nullptr;
    const double p = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0') {
      throw ParseError("translation table line " + std::to_string(lineno) + ": bad probability");
    }
    const std::size_t s = src == kNullToken ? kNull : source_vocab.id(src);
    table.set(target_vocab.id(tgt), s, p);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Model 1 EM

namespace {

void check_pairs(const std::vector<SentencePair>& pairs) {
  if (pairs.empty()) throw InputError("Model 1 needs a non-empty corpus");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k].source.empty() || pairs[k].target.empty()) {
      throw InputError("Model 1: empty sentence in pair " + std::to_string(k + 1));
    }
  }
}

}  // namespace

TranslationTable model1_uniform_table(const std::vector<SentencePair>& pairs, bool use_null) {
  check_pairs(pairs);
  std::map<std::size_t, std::set<std::size_t>> cooc;
  for (const auto& p : pairs) {
    for (auto x : p.source) cooc[x].insert(p.target.begin(), p.target.end());
    if (use_null) cooc[TranslationTable::kNull].insert(p.target.begin(), p.target.end());
  }
  TranslationTable table;
  for (const auto& [x, ys] : cooc) {
    const double u = 1.0 / static_cast<double>(ys.size());
    for (auto y : ys) table.set(y, x, u);
  }
  return table;
}

double model1_log_likelihood(const std::vector<SentencePair>& pairs, const TranslationTable& table,
                             bool use_null) {
  double ll = 0.0;
  for (const auto& p : pairs) {
    const double positions = static_cast<double>(p.source.size() + (use_null ? 1 : 0));
    for (auto y : p.target) {
      double total = use_null ? table.prob(y, TranslationTable::kNull) : 0.0;
      for (auto x : p.source) total += table.prob(y, x);
      ll += std::log(total / positions);
    }
  }
  return ll;
}

std::vector<double> link_posterior(const SentencePair& pair, std::size_t i,
                                   const TranslationTable& table, bool use_null) {
  const auto y = pair.target.at(i);
  std::vector<double> post;
  for (auto x : pair.source) post.push_back(table.prob(y, x));
  if (use_null) post.push_back(table.prob(y, TranslationTable::kNull));
  double total = 0.0;
  for (double p : post) total += p;
  for (double& p : post) p = total > 0.0 ? p / total : 0.0;
  return post;
}

Model1Result train_model1(const std::vector<SentencePair>& pairs, const Model1Options& options) {
  Model1Result result{model1_uniform_table(pairs, options.use_null), {}};
  TranslationTable& table = result.table;
  result.log_likelihood.push_back(model1_log_likelihood(pairs, table, options.use_null));

  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    // E-step: expected link counts keyed (source, target).
    std::map<std::pair<std::size_t, std::size_t>, double> counts;
    for (const auto& p : pairs) {
      for (auto y : p.target) {
        double denom = options.use_null ? table.prob(y, TranslationTable::kNull) : 0.0;
        for (auto x : p.source) denom += table.prob(y, x);
        if (denom <= 0.0) continue;
        for (auto x : p.source) counts[{x, y}] += table.prob(y, x) / denom;
        if (options.use_null) {
          counts[{TranslationTable::kNull, y}] += table.prob(y, TranslationTable::kNull) / denom;
        }
      }
    }
    // M-step: normalize per source word. Entries of one source are contiguous.
    TranslationTable next;
    auto it = counts.begin();
    while (it != counts.end()) {
      const std::size_t source = it->first.first;
      auto end = it;
      double total = 0.0;
      while (end != counts.end() && end->first.first == source) {
        total += end->second;
        ++end;
      }
      for (; it != end; ++it) next.set(it->first.second, source, it->second / total);
    }
    table = std::move(next);
    result.log_likelihood.push_back(model1_log_likelihood(pairs, table, options.use_null));
  }
  return result;
}

AlignmentMatrix viterbi_align(const SentencePair& pair, const TranslationTable& table,
                              bool use_null) {
  AlignmentMatrix m(pair.target.size(), pair.source.size());
  for (std::size_t i = 0; i < pair.target.size(); ++i) {
    const auto y = pair.target[i];
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t j = 0; j < pair.source.size(); ++j) {
      const double p = std::max(table.prob(y, pair.source[j]), kUnseenFloor);
      if (p > best_p) {
        best_p = p;
        best = j;
      }
    }
    const double null_p =
        use_null ? std::max(table.prob(y, TranslationTable::kNull), kUnseenFloor) : 0.0;
    if (use_null && null_p > best_p) continue;
    m.set(i, best, 1.0);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Link files

std::string format_links(const AlignmentMatrix& m) {
  std::string out;
  for (const auto& [j, i] : m.links()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(j) + "-" + std::to_string(i);
  }
  return out;
}

AlignmentMatrix parse_links(std::string_view line, std::size_t source_len, std::size_t target_len,
                            std::size_t line_number) {
  AlignmentMatrix m(target_len, source_len);
  auto fail = [&](const std::string& why) {
    throw ParseError("alignment line " + std::to_string(line_number) + ": " + why);
  };
  for (const auto& link : tokenize(line)) {
    const auto dash = link.find('-');
    if (dash == std::string::npos) fail("malformed link '" + link + "'");
    std::size_t j = 0, i = 0;
    const char* b = link.data();
    const char* e = link.data() + link.size();
    auto r1 = std::from_chars(b, b + dash, j);
    auto r2 = std::from_chars(b + dash + 1, e, i);
    if (r1.ec != std::errc() || r1.ptr != b + dash || r2.ec != std::errc() || r2.ptr != e) {
      fail("malformed link '" + link + "'");
    }
    if (j >= source_len || i >= target_len) {
      fail("link '" + link + "' out of range for source length " + std::to_string(source_len) +
           " and target length " + std::to_string(target_len));
    }
    m.set(i, j, 1.0);
  }
  return m;
}

std::vector<AlignmentMatrix> import_alignments(std::istream& in,
                                               const std::vector<SentencePair>& pairs) {
  const auto lines = read_lines(in);
  if (lines.size() != pairs.size()) {
    throw InputError("alignment file has " + std::to_string(lines.size()) + " lines but corpus has " +
                     std::to_string(pairs.size()) + " pairs");
  }
  std::vector<AlignmentMatrix> out;
  out.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    out.push_back(parse_links(lines[k], pairs[k].source.size(), pairs[k].target.size(), k + 1));
  }
  return out;
}

std::vector<AlignmentMatrix> import_alignments(const std::string& path,
                                               const std::vector<SentencePair>& pairs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open alignment file " + path);
  return import_alignments(in, pairs);
}

void write_alignments(std::ostream& out, const std::vector<AlignmentMatrix>& matrices) {
  for (const auto& m : matrices) out << format_links(m) << '\n';
}

}  // namespace gamt
