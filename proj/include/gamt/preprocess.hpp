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

// Persian-oriented text preprocessing: sentence splitting, zero-width
// character replacement, symbol detachment and lexicon-driven clitic
// separation. All functions take and return UTF-8.

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gamt {

struct CliticRule {
  std::string attached;   // single token, e.g. "آنها"
  std::string separated;  // space-separated form, e.g. "آن ها"
};

// Token rewrite table. Rules are validated on construction: both sides
// non-empty, attached forms unique and free of whitespace, the separated form
// spells the same letters as the attached one, and no separated token is
// itself an attached form (so a second pass never rewrites again).
class CliticLexicon {
 public:
  CliticLexicon() = default;
  explicit CliticLexicon(std::vector<CliticRule> rules);

  // Tab-separated "attached<TAB>separated" lines; '#' lines and blank lines are skipped.
  static CliticLexicon parse(std::istream& in);
  static CliticLexicon load(const std::string& path);
  // The Persian lexicon shipped in data/clitics_fa.tsv.
  static const CliticLexicon& builtin();

  const std::vector<CliticRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }
  const std::string* lookup(std::string_view token) const;

 private:
  std::vector<CliticRule> rules_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct PreprocessConfig {
  std::vector<char32_t> sentence_terminators{U'\u061F', U'.', U'!'};
  std::vector<char32_t> zero_width_codepoints{U'\u200C', U'\uFEFF'};
  CliticLexicon clitics;
};

enum class Language { kPersian, kEnglish };

// Splits after every terminator and at every line break. Each piece is
// trimmed; whitespace-only pieces are dropped; trailing text without a
// terminator becomes the last sentence.
std::vector<std::string> split_sentences(std::string_view text,
                                         const PreprocessConfig& config = {});

// Replaces zero-width codepoints with U+0020 and collapses space runs.
std::string replace_zero_width(std::string_view sentence, const PreprocessConfig& config = {});

std::string separate_clitics(std::string_view sentence, const CliticLexicon& lexicon);

// Puts single spaces between runs of punctuation/symbol codepoints (Unicode
// categories P* and S*) and adjacent letters or digits.
std::string detach_symbols(std::string_view sentence);

// Trims, and collapses every whitespace run into one U+0020.
std::string normalize_whitespace(std::string_view sentence);

// Full pipeline. kPersian: split, zero-width, symbols, clitics, whitespace.
// kEnglish: split, symbols, whitespace.
std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config = {},
                                    Language language = Language::kPersian);

// Codepoint classes used by detach_symbols; exposed for tests.
bool is_symbol(char32_t c);
bool is_space(char32_t c);

}  // namespace gamt
