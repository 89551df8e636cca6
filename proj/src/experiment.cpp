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

#include "gamt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "gamt/error.hpp"
#include "gamt/preprocess.hpp"
#include "gamt/random.hpp"

namespace gamt {
namespace {

// Persian letters that never change shape under preprocessing.
constexpr const char* kLetters[] = {
    "ب", "پ", "ت", "س", "ش", "ک", "گ", "ل",
    "م", "ن", "و", "ر", "د", "ز", "ف", "ق",
};

std::vector<std::string> synthetic_words(std::size_t count, Rng& rng) {
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (words.size() < count) {
    std::string w;
    for (std::size_t k = 0, n = 2 + rng.below(3); k < n; ++k) w += kLetters[rng.below(16)];
    if (CliticLexicon::builtin().lookup(w) != nullptr) continue;
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

std::string slug(const std::string& name) {
  std::string out;
  for (const char c : name) {
    if (c == '+') {
      if (!out.empty()) out += '_';
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

RawParallel make_synthetic(const SyntheticOptions& o) {
  if (o.word_types == 0 || o.min_length == 0 || o.min_length > o.max_length) {
    throw ConfigError("synthetic data needs word_types > 0 and 0 < min_len <= max_len");
  }
  if (!(o.noise >= 0.0 && o.noise <= 1.0) || !(o.swap_rate >= 0.0 && o.swap_rate <= 1.0)) {
    throw ConfigError("noise and swap_rate must lie in [0, 1]");
  }
  Rng rng(o.seed);
  const auto words = synthetic_words(o.word_types, rng);
  RawParallel data;
  for (std::size_t p = 0; p < o.pairs; ++p) {
    const std::size_t length = o.min_length + rng.below(o.max_length - o.min_length + 1);
    std::vector<std::size_t> ids(length);
    for (auto& id : ids) id = rng.below(o.word_types);
    std::string source;
    for (std::size_t k = 0; k < length; ++k) {
      if (k > 0) source += rng.bernoulli(o.noise) ? "\u200C" : " ";
      source += words[ids[k]];
    }
    source += rng.bernoulli(o.noise) ? "." : " .";
    std::vector<std::size_t> order = ids;
    for (std::size_t k = 0; k + 1 < length; ++k) {
      if (rng.bernoulli(o.swap_rate)) {
        std::swap(order[k], order[k + 1]);
        ++k;
      }
    }
    std::string target;
    for (const auto id : order) target += "w" + std::to_string(id) + " ";
    target += ".";
    data.source.push_back(std::move(source));
    data.target.push_back(std::move(target));
  }
  return data;
}

AlignmentMatrix diagonal_alignment(std::size_t target_length, std::size_t source_length) {
  AlignmentMatrix m(target_length, source_length);
  for (std::size_t i = 0; i < target_length; ++i) {
    const auto j = static_cast<std::size_t>((static_cast<double>(i) + 0.5) *
                                            static_cast<double>(source_length) /
                                            static_cast<double>(target_length));
    m.set(i, std::min(j, source_length - 1), 1.0);
  }
  return m;
}

AttentionStats attention_stats(const ModelState& state, const std::vector<SentencePair>& pairs) {
  double l1 = 0.0;
  std::size_t rows = 0, agree = 0;
  for (const auto& pair : pairs) {
    Tape tape;
    ModelGraph graph(tape, state);
    const AlignmentMatrix a = forward_teacher_forced(graph, pair).attention();
    const std::size_t T = pair.target.size(), S = pair.source.size();
    const AlignmentMatrix d = diagonal_alignment(T, S);
    for (std::size_t i = 0; i < T; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 0; j < S; ++j) {
        l1 += std::abs(a(i, j) - d(i, j));
        if (a(i, j) > a(i, best)) best = j;
      }
      agree += d(i, best) == 1.0;
      ++rows;
    }
  }
  if (rows == 0) return {};
  return {l1 / static_cast<double>(rows),
          static_cast<double>(agree) / static_cast<double>(rows)};
}

std::vector<Arm> standard_arms() {
  return {{"baseline", false, false},
          {"+preprocessing", true, false},
          {"+guided", false, true},
          {"+preprocessing+guided", true, true}};
}

ArmResult run_arm(const RawParallel& data, const Arm& arm, const RunConfig& config) {
  const std::size_t n = data.source.size();
  if (data.target.size() != n) {
    throw InputError("source has " + std::to_string(n) + " lines but target has " +
                     std::to_string(data.target.size()));
  }
  const double fraction = config.get_double("test_fraction");
  if (!(fraction > 0.0 && fraction < 0.5)) throw ConfigError("test_fraction must lie in (0, 0.5)");
  const std::size_t held =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * n)));
  if (n <= 2 * held) throw InputError("too few pairs to split into train, dev and test");

  PreprocessConfig pre;
  pre.clitics = CliticLexicon::builtin();
  std::vector<std::string> source;
  for (const auto& line : data.source) {
    if (!arm.preprocess) {
      source.push_back(line);
      continue;
    }
    std::string joined;
    for (const auto& sentence : preprocess(line, pre, Language::kPersian)) {
      if (!joined.empty()) joined += ' ';
      joined += sentence;
    }
    source.push_back(joined);
  }
  auto slice = [](const std::vector<std::string>& v, std::size_t b, std::size_t e) {
    return std::vector<std::string>(v.begin() + b, v.begin() + e);
  };
  const std::size_t train_end = n - 2 * held, dev_end = n - held;
  const ParallelCorpus train_corpus =
      make_parallel(slice(source, 0, train_end), slice(data.target, 0, train_end));
  const auto& sv = train_corpus.source_vocab;
  const auto& tv = train_corpus.target_vocab;
  const auto dev = make_parallel(slice(source, train_end, dev_end),
                                 slice(data.target, train_end, dev_end), sv, tv);
  const auto test = make_parallel(slice(source, dev_end, n), slice(data.target, dev_end, n), sv,
                                  tv);

  LossConfig loss = config.loss_config();
  loss.guided = arm.guided;
  std::vector<AlignmentMatrix> alignments;
  if (arm.guided) {
    const std::string& kind = config.get("alignment");
    if (kind == "diagonal") {
      for (const auto& p : train_corpus.pairs) {
        alignments.push_back(diagonal_alignment(p.target.size(), p.source.size()));
      }
    } else if (kind == "model1") {
      Model1Options options;
      if (const std::size_t iters = config.get_size("auto_align"); iters > 0) {
        options.iterations = iters;
      }
      const auto model1 = train_model1(train_corpus.pairs, options);
      for (const auto& p : train_corpus.pairs) {
        alignments.push_back(viterbi_align(p, model1.table, options.use_null));
      }
    } else {
      throw ConfigError("alignment must be model1 or diagonal, got '" + kind + "'");
    }
  }

  const ModelConfig model_config = config.model_config(sv.size(), tv.size());
  TrainResult trained = train(train_corpus.pairs, dev.pairs, ModelState(model_config), loss,
                              config.train_config(), arm.guided ? &alignments : nullptr);

  const std::size_t beam = config.get_size("beam");
  Corpus hyps, refs;
  std::vector<std::string> lines;
  for (std::size_t k = 0; k < test.pairs.size(); ++k) {
    const auto& src = test.pairs[k].source;
    const Hypothesis h =
        beam <= 1 ? greedy_decode(trained.state, src) : beam_decode(trained.state, src, beam);
    hyps.push_back(tv.decode(h.tokens));
    lines.push_back(join_tokens(hyps.back()));
    refs.push_back(tokenize(data.target[dev_end + k]));
  }
  return ArmResult{arm,
                   evaluate(hyps, refs),
                   attention_stats(trained.state, test.pairs),
                   attention_stats(trained.state, train_corpus.pairs),
                   std::move(trained.log),
                   std::move(lines),
                   std::move(trained.state)};
}

std::vector<ArmResult> run_experiment(const RawParallel& data, const std::vector<Arm>& arms,
                                      const RunConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ofstream(fs::path(out_dir) / "resolved.conf") << config.resolved();
  std::ofstream report(fs::path(out_dir) / "report.tsv");
  std::ofstream stats(fs::path(out_dir) / "attention_stats.tsv");
  if (!report || !stats) throw InputError("cannot write experiment output in " + out_dir);
  report << "arm\tseed\tbleu\taccuracy\tter\twer\tper\n" << std::flush;
  stats << "arm\tseed\tmean_l1_diagonal\targmax_agreement\n" << std::flush;
  const std::string& seed = config.get("seed");

  std::vector<ArmResult> results;
  for (const auto& arm : arms) {
    ArmResult r = run_arm(data, arm, config);
    const fs::path arm_dir = fs::path(out_dir) / slug(arm.name);
    fs::create_directories(arm_dir);
    std::ofstream log(arm_dir / "train_log.tsv");
    write_log(log, r.log);
    write_lines((arm_dir / "hyp.txt").string(), r.hypotheses);
    const auto& m = r.metrics;
    report << arm.name << '\t' << seed << '\t' << format_metric(m.bleu) << '\t'
           << format_metric(m.accuracy) << '\t' << format_metric(m.ter) << '\t'
           << format_metric(m.wer) << '\t' << format_metric(m.per) << '\n'
           << std::flush;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f", r.attention.mean_l1,
                  r.attention.argmax_agreement);
    stats << arm.name << '\t' << seed << '\t' << buf << '\n' << std::flush;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace gamt
