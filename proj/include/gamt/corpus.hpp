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

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gamt {

using TokenIds = std::vector<std::size_t>;
using Sentence = std::vector<std::string>;

// Token <-> id bijection with four reserved ids.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kBos = 1;
  static constexpr std::size_t kEos = 2;
  static constexpr std::size_t kUnk = 3;
  static constexpr std::size_t kReserved = 4;

  Vocabulary();

  // Most frequent first, ties by byte order. max_size counts the reserved
  // ids; 0 means unlimited.
  static Vocabulary build(const std::vector<Sentence>& sentences, std::size_t max_size = 0);
  // Reconstructs a vocabulary from its non-reserved tokens in id order.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return tokens_.size(); }
  std::size_t id(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t id) const;

  TokenIds encode(const Sentence& sentence) const;
  // Drops PAD/BOS/EOS; UNK is rendered as its token.
  Sentence decode(const TokenIds& ids) const;

  // Non-reserved tokens in id order.
  std::vector<std::string> user_tokens() const;

 private:
  void push(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SentencePair {
  TokenIds source;
  TokenIds target;
};

struct ParallelCorpus {
  Vocabulary source_vocab;
  Vocabulary target_vocab;
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
};

Sentence tokenize(std::string_view line);
std::string join_tokens(const Sentence& tokens);

std::vector<std::string> read_lines(std::istream& in);
std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

// Pairs line i of each side. Both sides must have equal line counts and no
// empty lines. Vocabularies are built from the data.
ParallelCorpus make_parallel(const std::vector<std::string>& source_lines,
                             const std::vector<std::string>& target_lines);
// Same, but encodes with existing vocabularies (unknown tokens map to UNK).
ParallelCorpus make_parallel(const std::vector<std::string>& source_lines,
                             const std::vector<std::string>& target_lines,
                             const Vocabulary& source_vocab, const Vocabulary& target_vocab);
ParallelCorpus load_parallel(const std::string& source_path, const std::string& target_path);

}  // namespace gamt
