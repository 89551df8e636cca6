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

// Binary checkpoint: "GAMT", u32 version, u32-length-prefixed key=value
// config block, then one record per parameter in storage order
// (u32-prefixed name, u32 rank, u32 dims, float64 data). All integers and
// floats are little-endian. The config block carries both vocabularies and
// an FNV-1a digest of the remaining lines, so header corruption is caught.

#include <cstdint>
#include <string>
#include <vector>

#include "gamt/corpus.hpp"
#include "gamt/model.hpp"

namespace gamt {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelState state;
  Vocabulary source_vocab;
  Vocabulary target_vocab;
};

std::vector<std::uint8_t> serialize_checkpoint(const ModelState& state, const Vocabulary& source,
                                               const Vocabulary& target);
// Throws FormatError with the byte offset of the problem; never returns a
// partially read state.
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

// Writes through a temporary file renamed into place.
void save_checkpoint(const std::string& path, const ModelState& state, const Vocabulary& source,
                     const Vocabulary& target);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gamt
