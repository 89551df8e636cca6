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

#include "gamt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "gamt/error.hpp"

namespace gamt {
namespace {

void check_counts(const Corpus& hyps, const Corpus& refs) {
  if (hyps.size() != refs.size()) {
    throw InputError("hypothesis has " + std::to_string(hyps.size()) +
                     " lines but reference has " + std::to_string(refs.size()));
  }
}

std::size_t reference_length(const Corpus& refs) {
  std::size_t n = 0;
  for (const auto& r : refs) n += r.size();
  if (n == 0) throw InputError("reference corpus has no tokens");
  return n;
}

template <typename LineErrors>
double error_rate(const Corpus& hyps, const Corpus& refs, LineErrors errors) {
  check_counts(hyps, refs);
  const std::size_t total = reference_length(refs);
  std::size_t sum = 0;
  for (std::size_t k = 0; k < hyps.size(); ++k) sum += errors(hyps[k], refs[k]);
  return 100.0 * static_cast<double>(sum) / static_cast<double>(total);
}

bool contains_block(const Sentence& ref, const Sentence& h, std::size_t start, std::size_t len) {
  if (len > ref.size()) return false;
  for (std::size_t p = 0; p + len <= ref.size(); ++p) {
    if (std::equal(h.begin() + start, h.begin() + start + len, ref.begin() + p)) return true;
  }
  return false;
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Sentence& s, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[std::vector<std::string>(s.begin() + i, s.begin() + i + n)];
  }
  return counts;
}

}  // namespace

std::size_t edit_distance(const Sentence& a, const Sentence& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

std::size_t per_errors(const Sentence& hyp, const Sentence& ref) {
  std::map<std::string, long> balance;
  for (const auto& t : ref) ++balance[t];
  std::size_t matches = 0;
  for (const auto& t : hyp) {
    auto it = balance.find(t);
    if (it != balance.end() && it->second > 0) {
      --it->second;
      ++matches;
    }
  }
  const std::size_t surplus = hyp.size() > ref.size() ? hyp.size() - ref.size() : 0;
  return surplus + (ref.size() - matches);
}

std::size_t ter_edits(const Sentence& hyp, const Sentence& ref) {
  Sentence h = hyp;
  std::size_t shifts = 0;
  std::size_t current = edit_distance(h, ref);
  while (current > 1) {
    std::size_t best_distance = current;
    Sentence best;
    for (std::size_t start = 0; start < h.size(); ++start) {
      for (std::size_t len = 1; len <= kMaxShiftLength && start + len <= h.size(); ++len) {
        if (!contains_block(ref, h, start, len)) break;  // longer blocks cannot match either
        Sentence rest(h.begin(), h.begin() + start);
        rest.insert(rest.end(), h.begin() + start + len, h.end());
        const std::size_t lo = start > kMaxShiftDistance ? start - kMaxShiftDistance : 0;
        const std::size_t hi = std::min(rest.size(), start + kMaxShiftDistance);
        for (std::size_t dest = lo; dest <= hi; ++dest) {
          if (dest == start) continue;
          Sentence moved(rest.begin(), rest.begin() + dest);
          moved.insert(moved.end(), h.begin() + start, h.begin() + start + len);
          moved.insert(moved.end(), rest.begin() + dest, rest.end());
          const std::size_t d = edit_distance(moved, ref);
          if (d + 1 < best_distance) {
            best_distance = d + 1;
            best = std::move(moved);
          }
        }
      }
    }
    if (best_distance >= current) break;
    h = std::move(best);
    ++shifts;
    current = best_distance - 1;
  }
  return shifts + current;
}

double bleu(const Corpus& hyps, const Corpus& refs, std::size_t max_n) {
  check_counts(hyps, refs);
  if (max_n == 0) throw ContractError("bleu: max_n must be positive");
  std::size_t hyp_len = 0, ref_len = 0;
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    hyp_len += hyps[k].size();
    ref_len += refs[k].size();
  }
  if (hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::size_t matched = 0, total = 0;
    for (std::size_t k = 0; k < hyps.size(); ++k) {
      const NgramCounts ref_counts = ngrams(refs[k], n);
      for (const auto& [gram, count] : ngrams(hyps[k], n)) {
        total += count;
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matched += std::min(count, it->second);
      }
    }
    if (matched == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
  }
  const double brevity =
      std::min(0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * std::exp(brevity + log_sum / static_cast<double>(max_n));
}

double accuracy(const Corpus& hyps, const Corpus& refs) {
  check_counts(hyps, refs);
  if (hyps.empty()) throw InputError("accuracy of an empty corpus");
  std::size_t exact = 0;
  for (std::size_t k = 0; k < hyps.size(); ++k) exact += hyps[k] == refs[k];
  return 100.0 * static_cast<double>(exact) / static_cast<double>(hyps.size());
}

double wer(const Corpus& hyps, const Corpus& refs) {
  return error_rate(hyps, refs, edit_distance);
}

double per(const Corpus& hyps, const Corpus& refs) {
  return error_rate(hyps, refs, per_errors);
}

double ter(const Corpus& hyps, const Corpus& refs) {
  return error_rate(hyps, refs, ter_edits);
}

MetricReport evaluate(const Corpus& hyps, const Corpus& refs) {
  MetricReport r;
  r.bleu = bleu(hyps, refs);
  r.accuracy = accuracy(hyps, refs);
  r.wer = wer(hyps, refs);
  r.per = per(hyps, refs);
  r.ter = ter(hyps, refs);
  r.sentences = hyps.size();
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    r.hyp_tokens += hyps[k].size();
    r.ref_tokens += refs[k].size();
  }
  return r;
}

MetricReport evaluate_files(const std::string& hyp_path, const std::string& ref_path) {
  auto load = [](const std::string& path) {
    Corpus c;
    for (const auto& line : read_lines(path)) c.push_back(tokenize(line));
    return c;
  };
  return evaluate(load(hyp_path), load(ref_path));
}

std::string format_metric(double value) {
  const double rounded = std::nearbyint(value * 100.0) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", rounded == 0.0 ? 0.0 : rounded);
  return buf;
}

}  // namespace gamt
