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

// Flat `key = value` run configuration. A fixed key set with defaults is
// overlaid first by a config file and then by command-line values.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "gamt/model.hpp"
#include "gamt/objective.hpp"
#include "gamt/trainer.hpp"

namespace gamt {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

class RunConfig {
 public:
  RunConfig();

  static const std::vector<ConfigKey>& keys();
  static bool known(const std::string& key);

  // `#` starts a comment; blank lines are ignored. Unknown keys, lines
  // without '=' and repeated keys are ConfigErrors naming origin and line.
  void parse(std::istream& in, const std::string& origin);
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // Every key, one `key = value` line each, in declaration order.
  std::string resolved() const;

  ModelConfig model_config(std::size_t src_vocab_size, std::size_t tgt_vocab_size) const;
  TrainConfig train_config() const;
  LossConfig loss_config() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gamt
