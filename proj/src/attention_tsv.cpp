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

#include "gamt/attention_tsv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "gamt/error.hpp"

namespace gamt {

std::vector<long long> round_row_to_millionths(std::span<const double> row) {
  constexpr double kScale = 1e6;
  std::vector<long long> units(row.size());
  std::vector<double> remainder(row.size());
  double total = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double scaled = row[j] * kScale;
    units[j] = static_cast<long long>(std::floor(scaled));
    remainder[j] = scaled - static_cast<double>(units[j]);
    total += row[j];
  }
  const long long target = std::llround(total * kScale);
  long long missing = target - std::accumulate(units.begin(), units.end(), 0LL);
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; missing > 0 && k < order.size(); ++k, --missing) ++units[order[k]];
  return units;
}

std::string attention_tsv(const AlignmentMatrix& attention, const Sentence& source,
                          const Sentence& target) {
  if (attention.cols() != source.size() || attention.rows() != target.size()) {
    throw ContractError("attention_tsv: " + std::to_string(attention.rows()) + "x" +
                        std::to_string(attention.cols()) + " matrix for " +
                        std::to_string(target.size()) + " target and " +
                        std::to_string(source.size()) + " source tokens");
  }
  std::string out;
  for (const auto& s : source) out += "\t" + s;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < target.size(); ++i) {
    out += target[i];
    const auto units = round_row_to_millionths(
        attention.values().subspan(i * attention.cols(), attention.cols()));
    for (const long long u : units) {
      std::snprintf(buf, sizeof buf, "\t%lld.%06lld", u / 1000000, u % 1000000);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace gamt
