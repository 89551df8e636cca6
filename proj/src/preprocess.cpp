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

#include "gamt/preprocess.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gamt/error.hpp"

namespace gamt {
namespace {

std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  [[maybe_unused]] UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

std::string encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

bool contains(const std::vector<char32_t>& set, char32_t c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  return tokens;
}

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ') out.push_back(c);
  }
  return out;
}

}  // namespace

bool is_symbol(char32_t c) {
  const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

// ---------------------------------------------------------------------------
// CliticLexicon

CliticLexicon::CliticLexicon(std::vector<CliticRule> rules) : rules_(std::move(rules)) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.attached.empty() || r.separated.empty()) {
      throw ConfigError("clitic rule " + std::to_string(i + 1) + " has an empty side");
    }
    if (r.attached.find(' ') != std::string::npos || r.attached.find('\t') != std::string::npos) {
      throw ConfigError("clitic rule " + std::to_string(i + 1) + ": attached form '" + r.attached +
                        "' must be a single token");
    }
    if (strip_spaces(r.separated) != r.attached) {
      throw ConfigError("clitic rule " + std::to_string(i + 1) + ": '" + r.separated +
                        "' does not spell '" + r.attached + "'");
    }
    if (!index_.emplace(r.attached, i).second) {
      throw ConfigError("duplicate clitic rule for '" + r.attached + "'");
    }
  }
  for (const auto& r : rules_) {
    for (auto tok : split_tokens(r.separated)) {
      if (index_.count(std::string(tok))) {
        throw ConfigError("clitic rule output token '" + std::string(tok) +
                          "' is itself an attached form");
      }
    }
  }
}

CliticLexicon CliticLexicon::parse(std::istream& in) {
  std::vector<CliticRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("clitic lexicon line " + std::to_string(lineno) + ": expected a TAB");
    }
    rules.push_back({line.substr(0, tab), normalize_whitespace(line.substr(tab + 1))});
  }
  return CliticLexicon(std::move(rules));
}

CliticLexicon CliticLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open clitic lexicon: " + path);
  return parse(in);
}

const CliticLexicon& CliticLexicon::builtin() {
  static const CliticLexicon lexicon = [] {
    std::istringstream in(
#include "default_clitics.inc"
    );
    return parse(in);
  }();
  return lexicon;
}

const std::string* CliticLexicon::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? nullptr : &rules_[it->second].separated;
}

// ---------------------------------------------------------------------------
// Pipeline stages

std::vector<std::string> split_sentences(std::string_view text, const PreprocessConfig& config) {
  std::vector<std::string> out;
  std::u32string current;
  auto flush = [&] {
    auto s = normalize_whitespace(encode(current));
    if (!s.empty()) out.push_back(std::move(s));
    current.clear();
  };
  for (char32_t c : decode(text)) {
    if (c == U'\n' || c == U'\r') {
      flush();
      continue;
    }
    current.push_back(c);
    if (contains(config.sentence_terminators, c)) flush();
  }
  flush();
  return out;
}

std::string replace_zero_width(std::string_view sentence, const PreprocessConfig& config) {
  std::string out;
  out.reserve(sentence.size());
  for (char32_t c : decode(sentence)) {
    if (contains(config.zero_width_codepoints, c)) c = U' ';
    if (c == U' ' && !out.empty() && out.back() == ' ') continue;
    append_utf8(out, c);
  }
  return out;
}

std::string separate_clitics(std::string_view sentence, const CliticLexicon& lexicon) {
  if (lexicon.empty()) return std::string(sentence);
  std::string out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    if (sentence[i] == ' ') {
      out.push_back(' ');
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < sentence.size() && sentence[i] != ' ') ++i;
    const auto token = sentence.substr(start, i - start);
    if (const std::string* replacement = lexicon.lookup(token)) {
      out += *replacement;
    } else {
      out += token;
    }
  }
  return out;
}

std::string detach_symbols(std::string_view sentence) {
  enum class Kind { kSpace, kSymbol, kWord };
  auto kind = [](char32_t c) {
    if (is_space(c)) return Kind::kSpace;
    return is_symbol(c) ? Kind::kSymbol : Kind::kWord;
  };
  std::string out;
  out.reserve(sentence.size() + 8);
  Kind prev = Kind::kSpace;
  for (char32_t c : decode(sentence)) {
    const Kind k = kind(c);
    if (k != Kind::kSpace && prev != Kind::kSpace && k != prev) out.push_back(' ');
    append_utf8(out, c);
    prev = k;
  }
  return out;
}

std::string normalize_whitespace(std::string_view sentence) {
  std::string out;
  bool pending_space = false;
  for (char32_t c : decode(sentence)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    append_utf8(out, c);
  }
  return out;
}

std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config,
                                    Language language) {
  std::vector<std::string> out;
  for (auto& sentence : split_sentences(text, config)) {
    std::string s = std::move(sentence);
    if (language == Language::kPersian) {
      s = replace_zero_width(s, config);
      s = detach_symbols(s);
      s = separate_clitics(normalize_whitespace(s), config.clitics);
    } else {
      s = detach_symbols(s);
    }
    s = normalize_whitespace(s);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gamt
