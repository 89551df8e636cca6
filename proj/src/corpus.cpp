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

#include "gamt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "gamt/error.hpp"

namespace gamt {

Vocabulary::Vocabulary() {
  for (const char* t : {"<pad>", "<s>", "</s>", "<unk>"}) push(t);
}

void Vocabulary::push(std::string token) {
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(const std::vector<Sentence>& sentences, std::size_t max_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s) counts[t]++;
  }
  std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (auto& [token, count] : ordered) {
    if (max_size && v.size() >= max_size) break;
    if (v.contains(token)) continue;
    v.push(token);
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const auto& t : tokens) {
    if (v.contains(t)) throw FormatError("duplicate vocabulary token: " + t);
    v.push(t);
  }
  return v;
}

std::size_t Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(std::size_t id) const {
  if (id >= tokens_.size()) {
    throw IndexError("vocabulary id " + std::to_string(id) + " out of range for size " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

TokenIds Vocabulary::encode(const Sentence& sentence) const {
  TokenIds ids;
  ids.reserve(sentence.size());
  for (const auto& t : sentence) ids.push_back(id(t));
  return ids;
}

Sentence Vocabulary::decode(const TokenIds& ids) const {
  Sentence out;
  for (auto id : ids) {
    if (id == kPad || id == kBos || id == kEos) continue;
    out.push_back(token(id));
  }
  return out;
}

std::vector<std::string> Vocabulary::user_tokens() const {
  return {tokens_.begin() + kReserved, tokens_.end()};
}

Sentence tokenize(std::string_view line) {
  Sentence out;
  std::size_t i = 0;
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < line.size()) {
    while (i < line.size() && is_ws(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_ws(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string join_tokens(const Sentence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_lines(in);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw Error("write failed: " + path);
}

namespace {

void check_parallel(const std::vector<std::string>& source_lines,
                    const std::vector<std::string>& target_lines) {
  if (source_lines.size() != target_lines.size()) {
    throw InputError("parallel corpus line counts differ: " + std::to_string(source_lines.size()) +
                     " source vs " + std::to_string(target_lines.size()) + " target");
  }
}

ParallelCorpus encode_pairs(const std::vector<Sentence>& src, const std::vector<Sentence>& tgt,
                            Vocabulary sv, Vocabulary tv) {
  ParallelCorpus corpus{std::move(sv), std::move(tv), {}};
  corpus.pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].empty() || tgt[i].empty()) {
      throw InputError("empty sentence at line " + std::to_string(i + 1) + " of parallel corpus");
    }
    corpus.pairs.push_back({corpus.source_vocab.encode(src[i]), corpus.target_vocab.encode(tgt[i])});
  }
  return corpus;
}

std::vector<Sentence> tokenize_all(const std::vector<std::string>& lines) {
  std::vector<Sentence> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(tokenize(l));
  return out;
}

}  // namespace

ParallelCorpus make_parallel(const std::vector<std::string>& source_lines,
                             const std::vector<std::string>& target_lines) {
  check_parallel(source_lines, target_lines);
  auto src = tokenize_all(source_lines);
  auto tgt = tokenize_all(target_lines);
  auto sv = Vocabulary::build(src);
  auto tv = Vocabulary::build(tgt);
  return encode_pairs(src, tgt, std::move(sv), std::move(tv));
}

ParallelCorpus make_parallel(const std::vector<std::string>& source_lines,
                             const std::vector<std::string>& target_lines,
                             const Vocabulary& source_vocab, const Vocabulary& target_vocab) {
  check_parallel(source_lines, target_lines);
  return encode_pairs(tokenize_all(source_lines), tokenize_all(target_lines), source_vocab,
                      target_vocab);
}

ParallelCorpus load_parallel(const std::string& source_path, const std::string& target_path) {
  return make_parallel(read_lines(source_path), read_lines(target_path));
}

}  // namespace gamt
