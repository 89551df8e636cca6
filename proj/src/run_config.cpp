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

#include "gamt/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "gamt/error.hpp"

namespace gamt {

const std::vector<ConfigKey>& RunConfig::keys() {
  static const std::vector<ConfigKey> k = {
      {"seed", "1", "seed for initialization, shuffling and synthetic data"},
      {"layers", "1", "GRU layers in encoder and decoder"},
      {"hidden", "64", "hidden units per layer"},
      {"embed", "32", "embedding width"},
      {"max_decode_factor", "2", "decode limit is ceil(factor * source length) + 5"},
      {"src_vocab_max", "0", "source vocabulary cap including reserved ids (0 = none)"},
      {"tgt_vocab_max", "0", "target vocabulary cap including reserved ids (0 = none)"},
      {"lr0", "0.5", "initial learning rate"},
      {"decay_factor", "0.5", "learning-rate decay factor"},
      {"patience", "3", "dev evaluations without improvement before decay"},
      {"epochs", "10", "training epochs"},
      {"batch_size", "32", "sentence pairs per update"},
      {"eval_every", "50", "updates between dev evaluations"},
      {"clip_norm", "5", "global gradient-norm clip (0 disables)"},
      {"guided", "false", "add the guided-alignment penalty"},
      {"omega", "0.2", "guided-alignment weight"},
      {"src", "", "training source file"},
      {"tgt", "", "training target file"},
      {"dev_src", "", "dev source file (defaults to the training data)"},
      {"dev_tgt", "", "dev target file"},
      {"align", "", "alignment links file, one line per training pair"},
      {"auto_align", "0", "IBM Model 1 iterations to produce alignments (0 = off)"},
      {"beam", "1", "beam width for translation (1 = greedy)"},
      {"pairs", "500", "synthetic sentence pairs"},
      {"word_types", "24", "synthetic source word types"},
      {"min_len", "3", "shortest synthetic sentence"},
      {"max_len", "8", "longest synthetic sentence"},
      {"noise", "0.3", "rate of synthetic ZWNJ joins and attached punctuation"},
      {"swap_rate", "0", "rate of adjacent target swaps in synthetic data"},
      {"test_fraction", "0.1", "share of pairs held out for testing (and again for dev)"},
      {"alignment", "model1", "guided reference in experiments: model1 or diagonal"},
  };
  return k;
}

bool RunConfig::known(const std::string& key) {
  for (const auto& k : keys()) {
    if (k.name == key) return true;
  }
  return false;
}

RunConfig::RunConfig() {
  for (const auto& k : keys()) values_[k.name] = k.default_value;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::parse(std::istream& in, const std::string& origin) {
  std::string line;
  std::set<std::string> seen;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!known(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": repeated key '" + key + "'");
    values_[key] = trim(line.substr(eq + 1));
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  parse(in, path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  return static_cast<std::size_t>(get_u64(key));
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string RunConfig::resolved() const {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + values_.at(k.name) + "\n";
  return out;
}

ModelConfig RunConfig::model_config(std::size_t src_vocab_size,
                                    std::size_t tgt_vocab_size) const {
  ModelConfig c;
  c.num_layers = get_size("layers");
  c.hidden_size = get_size("hidden");
  c.embed_size = get_size("embed");
  c.max_decode_factor = get_double("max_decode_factor");
  c.src_vocab_size = src_vocab_size;
  c.tgt_vocab_size = tgt_vocab_size;
  c.seed = get_u64("seed");
  c.validate();
  return c;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  c.lr0 = get_double("lr0");
  c.decay_factor = get_double("decay_factor");
  c.patience = get_size("patience");
  c.epochs = get_size("epochs");
  c.batch_size = get_size("batch_size");
  c.eval_every = get_size("eval_every");
  c.clip_norm = get_double("clip_norm");
  c.seed = get_u64("seed");
  c.validate();
  return c;
}

LossConfig RunConfig::loss_config() const {
  LossConfig c;
  c.omega = get_double("omega");
  c.guided = get_bool("guided");
  c.validate();
  return c;
}

}  // namespace gamt
