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

// Attention heatmaps as TSV: a header row of source tokens, then one row per
// target token with six-decimal weights.

#include <string>
#include <vector>

#include "gamt/aligner.hpp"
#include "gamt/corpus.hpp"

namespace gamt {

// Each row is rounded to millionths by largest remainder, so the printed
// values of a stochastic row add up to exactly 1.
std::vector<long long> round_row_to_millionths(std::span<const double> row);

std::string attention_tsv(const AlignmentMatrix& attention, const Sentence& source,
                          const Sentence& target);

}  // namespace gamt
