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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gamt/checkpoint.hpp"
#include "gamt/error.hpp"
#include "model_fixtures.hpp"

namespace gamt {
namespace {

struct Fixture {
  Vocabulary source = Vocabulary::from_tokens({"a", "b", "c"});
  Vocabulary target = Vocabulary::from_tokens({"x", "y", "z=1"});
  ModelConfig config() const {
    ModelConfig c = testing::tiny_config(3);
    c.num_layers = 2;
    c.src_vocab_size = source.size();
    c.tgt_vocab_size = target.size();
    c.max_decode_factor = 1.7;
    return c;
  }
};

void expect_identical(const ModelState& a, const ModelState& b) {
  ASSERT_EQ(a.params().size(), b.params().size());
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    EXPECT_EQ(a.params().name(i), b.params().name(i));
    EXPECT_TRUE(a.params().value(i).identical(b.params().value(i))) << a.params().name(i);
  }
}

// Offset one past the end of the config block.
std::size_t header_end(const std::vector<std::uint8_t>& bytes) {
  const std::size_t n = bytes[8] | bytes[9] << 8 | bytes[10] << 16 | bytes[11] << 24;
  return 12 + n;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Fixture f;
  const ModelState s = testing::random_model(f.config(), 4, 3.0);
  const Checkpoint back = deserialize_checkpoint(serialize_checkpoint(s, f.source, f.target));
  expect_identical(s, back.state);
  EXPECT_EQ(back.state.config().num_layers, 2u);
  EXPECT_EQ(back.state.config().max_decode_factor, 1.7);
  EXPECT_EQ(back.state.config().seed, 3u);
  EXPECT_EQ(back.source_vocab.user_tokens(), f.source.user_tokens());
  EXPECT_EQ(back.target_vocab.user_tokens(), f.target.user_tokens());
}

TEST(Checkpoint, LayoutStartsWithMagicAndVersion) {
  Fixture f;
  const auto bytes = serialize_checkpoint(ModelState(f.config()), f.source, f.target);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "GAMT");
  EXPECT_EQ(bytes[4], kCheckpointVersion);
  EXPECT_EQ(bytes[5] | bytes[6] | bytes[7], 0);
  const std::string block(bytes.begin() + 12, bytes.begin() + header_end(bytes));
  EXPECT_EQ(block.rfind("num_layers=2\n", 0), 0u);
  EXPECT_NE(block.find("\ntgt_vocab=x y z=1\n"), std::string::npos);
}

TEST(Checkpoint, EveryHeaderByteFlipIsRejected) {
  Fixture f;
  const auto bytes = serialize_checkpoint(ModelState(f.config()), f.source, f.target);
  for (std::size_t at = 0; at < header_end(bytes); ++at) {
    for (const std::uint8_t mask : {0x01, 0x80}) {
      auto corrupt = bytes;
      corrupt[at] ^= mask;
      EXPECT_THROW(deserialize_checkpoint(corrupt), FormatError) << "offset " << at;
    }
  }
}

TEST(Checkpoint, ErrorsCarryOffsets) {
  Fixture f;
  auto bytes = serialize_checkpoint(ModelState(f.config()), f.source, f.target);
  auto message = [](const std::vector<std::uint8_t>& b) {
    try {
      deserialize_checkpoint(b);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_NE(message(bad_magic).find("bad magic at offset 0"), std::string::npos);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_NE(message(bad_version).find("version 9 at offset 4"), std::string::npos);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_NE(message(truncated).find("truncated parameter data"), std::string::npos);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_NE(message(trailing).find("trailing bytes at offset " + std::to_string(bytes.size())),
            std::string::npos);
}

TEST(Checkpoint, EveryTruncationIsRejected) {
  Fixture f;
  const auto bytes = serialize_checkpoint(ModelState(f.config()), f.source, f.target);
  for (std::size_t n = 0; n < bytes.size(); n += 7) {
    const std::vector<std::uint8_t> prefix(bytes.begin(), bytes.begin() + n);
    EXPECT_THROW(deserialize_checkpoint(prefix), FormatError) << n;
  }
}

TEST(Checkpoint, FileRoundTripReadsConfigFromFile) {
  Fixture f;
  const ModelState s(f.config());
  const auto dir = std::filesystem::temp_directory_path() / "gamt_checkpoint_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.gamt").string();
  save_checkpoint(path, s, f.source, f.target);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  const Checkpoint back = load_checkpoint(path);
  EXPECT_EQ(back.state.config().num_layers, 2u);
  expect_identical(s, back.state);
  EXPECT_THROW(load_checkpoint((dir / "missing.gamt").string()), InputError);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, VocabularyMustMatchConfig) {
  Fixture f;
  const ModelState s(f.config());
  EXPECT_THROW(serialize_checkpoint(s, Vocabulary(), f.target), ContractError);
}

}  // namespace
}  // namespace gamt
