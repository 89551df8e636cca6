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

#include "gamt/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include "gamt/error.hpp"

namespace gamt {
namespace {

constexpr char kMagic[4] = {'G', 'A', 'M', 'T'};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == in_.size(); }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw FormatError("checkpoint: " + what + " at offset " + std::to_string(at));
  }
  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) fail(std::string("truncated ") + what, pos_);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8, "parameter data");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string config_lines(const ModelConfig& c, const Vocabulary& source,
                         const Vocabulary& target) {
  std::ostringstream out;
  char factor[32];
  std::snprintf(factor, sizeof factor, "%.17g", c.max_decode_factor);
  out << "num_layers=" << c.num_layers << '\n'
      << "hidden_size=" << c.hidden_size << '\n'
      << "embed_size=" << c.embed_size << '\n'
      << "src_vocab_size=" << c.src_vocab_size << '\n'
      << "tgt_vocab_size=" << c.tgt_vocab_size << '\n'
      << "max_decode_factor=" << factor << '\n'
      << "seed=" << c.seed << '\n'
      << "src_vocab=" << join(source.user_tokens()) << '\n'
      << "tgt_vocab=" << join(target.user_tokens()) << '\n';
  return out.str();
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    const std::size_t end = std::min(s.find(' ', start), s.size());
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const ModelState& state, const Vocabulary& source,
                                               const Vocabulary& target) {
  const ModelConfig& c = state.config();
  if (source.size() != c.src_vocab_size || target.size() != c.tgt_vocab_size) {
    throw ContractError("checkpoint: vocabulary sizes " + std::to_string(source.size()) + "/" +
                        std::to_string(target.size()) + " do not match config " +
                        std::to_string(c.src_vocab_size) + "/" +
                        std::to_string(c.tgt_vocab_size));
  }
  std::string block = config_lines(c, source, target);
  block += "digest=" + hex64(fnv1a(block)) + "\n";

  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.str(block);
  const ParameterStore& params = state.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& t = params.value(i);
    w.str(params.name(i));
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (const std::size_t d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (const double v : t.data()) w.f64(v);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) r.fail("bad magic", 0);
  r.u32("magic");
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    r.fail("unsupported version " + std::to_string(version), version_at);
  }
  const std::size_t block_at = r.offset() + 4;
  const std::string block = r.str("config block");

  // Parse key=value lines; the digest line must be last.
  std::map<std::string, std::string> kv;
  std::size_t digest_line = std::string::npos;
  std::size_t pos = 0;
  while (pos < block.size()) {
    const std::size_t nl = block.find('\n', pos);
    if (nl == std::string::npos) r.fail("unterminated config line", block_at + pos);
    const std::string line = block.substr(pos, nl - pos);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) r.fail("config line without '='", block_at + pos);
    const std::string key = line.substr(0, eq);
    if (key == "digest") digest_line = pos;
    if (!kv.emplace(key, line.substr(eq + 1)).second) {
      r.fail("duplicate config key '" + key + "'", block_at + pos);
    }
    pos = nl + 1;
  }
  if (digest_line == std::string::npos) r.fail("missing digest", block_at);
  if (block.size() != digest_line + 7 + 16 + 1 ||
      kv["digest"] != hex64(fnv1a(std::string_view(block).substr(0, digest_line)))) {
    r.fail("config digest mismatch", block_at + digest_line);
  }

  auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) r.fail("missing config key '" + key + "'", block_at);
    std::string value = it->second;
    kv.erase(it);
    return value;
  };
  auto take_size = [&](const std::string& key) {
    const std::string v = take(key);
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      r.fail("bad integer for '" + key + "'", block_at);
    }
    return out;
  };
  ModelConfig config;
  config.num_layers = take_size("num_layers");
  config.hidden_size = take_size("hidden_size");
  config.embed_size = take_size("embed_size");
  config.src_vocab_size = take_size("src_vocab_size");
  config.tgt_vocab_size = take_size("tgt_vocab_size");
  config.seed = take_size("seed");
  {
    const std::string v = take("max_decode_factor");
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), config.max_decode_factor);
    if (ec != std::errc() || p != v.data() + v.size()) {
      r.fail("bad number for 'max_decode_factor'", block_at);
    }
  }
  const Vocabulary source = Vocabulary::from_tokens(split_tokens(take("src_vocab")));
  const Vocabulary target = Vocabulary::from_tokens(split_tokens(take("tgt_vocab")));
  kv.erase("digest");
  if (!kv.empty()) r.fail("unknown config key '" + kv.begin()->first + "'", block_at);
  try {
    config.validate();
  } catch (const ConfigError& e) {
    r.fail(std::string("invalid config: ") + e.what(), block_at);
  }
  if (source.size() != config.src_vocab_size || target.size() != config.tgt_vocab_size) {
    r.fail("vocabulary size does not match config", block_at);
  }

  ParameterStore params;
  for (const auto& spec : parameter_specs(config)) {
    const std::size_t record_at = r.offset();
    const std::string name = r.str("parameter name");
    if (name != spec.name) {
      r.fail("expected parameter '" + spec.name + "', found '" + name + "'", record_at);
    }
    const std::size_t rank_at = r.offset();
    const std::uint32_t rank = r.u32("parameter rank");
    if (rank != spec.shape.size()) r.fail("bad rank for " + name, rank_at);
    Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.u32("parameter dims"));
    if (shape != spec.shape) {
      r.fail("shape " + shape_string(shape) + " for " + name + ", expected " +
                 shape_string(spec.shape),
             rank_at);
    }
    std::size_t n = 1;
    for (const auto d : shape) n *= d;
    r.need(n * 8, "parameter data");
    std::vector<double> data(n);
    for (auto& v : data) v = r.f64();
    params.add(name, Tensor(shape, std::move(data)));
  }
  if (!r.at_end()) r.fail("trailing bytes", r.offset());
  return Checkpoint{ModelState(config, std::move(params)), source, target};
}

void save_checkpoint(const std::string& path, const ModelState& state, const Vocabulary& source,
                     const Vocabulary& target) {
  const auto bytes = serialize_checkpoint(state, source, target);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write checkpoint " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing checkpoint " + path);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace gamt
