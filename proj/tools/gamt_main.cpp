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

// gamt: command-line front end. Exit codes: 0 success, 1 internal failure,
// 2 usage, configuration or input error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gamt/attention_tsv.hpp"
#include "gamt/checkpoint.hpp"
#include "gamt/error.hpp"
#include "gamt/experiment.hpp"
#include "gamt/metrics.hpp"
#include "gamt/preprocess.hpp"
#include "gamt/run_config.hpp"

namespace fs = std::filesystem;
using namespace gamt;

namespace {

// Flags shared by every subcommand plus any RunConfig keys it exposes as
// --key-name options.
struct Common {
  std::string config_path;
  std::string seed;
  std::string out;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

std::string flag_name(const std::string& key) {
  std::string name = "--" + key;
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
  cmd->add_option("--config", c.config_path, "key = value configuration file");
  cmd->add_option("--seed", c.seed, "random seed (overrides the config file)");
  cmd->add_option("--out", c.out, out_help);
}

void expose(CLI::App* cmd, Common& c, std::initializer_list<const char*> keys) {
  for (const std::string key : keys) {
    std::string help;
    for (const auto& k : RunConfig::keys()) {
      if (k.name == key) help = k.help + " [" + k.default_value + "]";
    }
    c.options[key] = cmd->add_option(flag_name(key), c.values[key], help);
  }
}

RunConfig resolve(const Common& c) {
  RunConfig rc;
  if (!c.config_path.empty()) rc.load_file(c.config_path);
  for (const auto& [key, option] : c.options) {
    if (option->count() > 0) rc.set(key, c.values.at(key));
  }
  if (!c.seed.empty()) rc.set("seed", c.seed);
  std::cerr << "# resolved configuration\n" << rc.resolved();
  return rc;
}

std::string require_value(const RunConfig& rc, const std::string& key) {
  const std::string& v = rc.get(key);
  if (v.empty()) throw UsageError(flag_name(key) + " is required");
  return v;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("no such file: " + path);
}

void refuse_overwrite(const std::string& input, const std::string& output) {
  if (fs::exists(output) && fs::equivalent(input, output)) {
    throw UsageError("refusing to overwrite input file " + input);
  }
}

std::ofstream open_output(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

std::vector<Sentence> tokenized(const std::vector<std::string>& lines) {
  std::vector<Sentence> out;
  for (const auto& l : lines) out.push_back(tokenize(l));
  return out;
}

// --- preprocess --------------------------------------------------------

struct PreprocessArgs {
  Common common;
  std::string in, clitics, lang = "fa";
};

int cmd_preprocess(const PreprocessArgs& a) {
  resolve(a.common);
  if (a.common.out.empty()) throw UsageError("--out FILE is required");
  require_file(a.in);
  refuse_overwrite(a.in, a.common.out);
  PreprocessConfig config;
  Language language = Language::kPersian;
  if (a.lang == "en") {
    language = Language::kEnglish;
    config.sentence_terminators = {U'.', U'!', U'?'};
  } else if (a.lang != "fa") {
    throw UsageError("--lang must be fa or en");
  }
  config.clitics = a.clitics.empty() ? CliticLexicon::builtin() : CliticLexicon::load(a.clitics);
  std::ifstream in(a.in, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  write_lines(a.common.out, preprocess(text.str(), config, language));
  return 0;
}

// --- align -------------------------------------------------------------

struct AlignArgs {
  Common common;
  std::string src, tgt, table, links;
  std::size_t iters = 5;
};

int cmd_align(AlignArgs a) {
  resolve(a.common);
  require_file(a.src);
  require_file(a.tgt);
  if (!a.common.out.empty()) {
    if (a.table.empty()) a.table = (fs::path(a.common.out) / "table.tsv").string();
    if (a.links.empty()) a.links = (fs::path(a.common.out) / "links.txt").string();
  }
  if (a.table.empty() && a.links.empty()) {
    throw UsageError("nothing to write: give --out DIR, --out-table or --out-links");
  }
  const ParallelCorpus corpus = load_parallel(a.src, a.tgt);
  Model1Options options;
  options.iterations = a.iters;
  const Model1Result result = train_model1(corpus.pairs, options);
  for (std::size_t k = 0; k < result.log_likelihood.size(); ++k) {
    std::fprintf(stderr, "iteration %zu\tlog-likelihood %.6f\n", k, result.log_likelihood[k]);
  }
  if (!a.table.empty()) {
    auto out = open_output(a.table);
    result.table.save(out, corpus.source_vocab, corpus.target_vocab);
  }
  if (!a.links.empty()) {
    std::vector<AlignmentMatrix> links;
    for (const auto& p : corpus.pairs) links.push_back(viterbi_align(p, result.table));
    auto out = open_output(a.links);
    write_alignments(out, links);
  }
  return 0;
}

// --- train -------------------------------------------------------------

struct TrainArgs {
  Common common;
  bool guided = false;
};

int cmd_train(const TrainArgs& a) {
  RunConfig rc = resolve(a.common);
  if (a.guided) rc.set("guided", "true");
  if (a.common.out.empty()) throw UsageError("--out DIR is required");
  const std::string src = require_value(rc, "src"), tgt = require_value(rc, "tgt");
  require_file(src);
  require_file(tgt);
  const LossConfig loss = rc.loss_config();
  const std::string align_path = rc.get("align");
  const std::size_t auto_align = rc.get_size("auto_align");
  if (loss.guided && align_path.empty() && auto_align == 0) {
    throw ConfigError("guided training needs --align FILE or --auto-align N");
  }
  if (!align_path.empty() && auto_align > 0) {
    throw ConfigError("--align and --auto-align are mutually exclusive");
  }

  const auto src_lines = read_lines(src), tgt_lines = read_lines(tgt);
  const Vocabulary sv = Vocabulary::build(tokenized(src_lines), rc.get_size("src_vocab_max"));
  const Vocabulary tv = Vocabulary::build(tokenized(tgt_lines), rc.get_size("tgt_vocab_max"));
  const ParallelCorpus corpus = make_parallel(src_lines, tgt_lines, sv, tv);
  std::vector<SentencePair> dev;
  if (!rc.get("dev_src").empty() || !rc.get("dev_tgt").empty()) {
    const std::string ds = require_value(rc, "dev_src"), dt = require_value(rc, "dev_tgt");
    require_file(ds);
    require_file(dt);
    dev = make_parallel(read_lines(ds), read_lines(dt), sv, tv).pairs;
  }

  fs::create_directories(a.common.out);
  const fs::path out(a.common.out);
  std::ofstream(out / "resolved.conf") << rc.resolved();

  std::vector<AlignmentMatrix> alignments;
  if (!align_path.empty()) {
    require_file(align_path);
    alignments = import_alignments(align_path, corpus.pairs);
  } else if (auto_align > 0) {
    Model1Options options;
    options.iterations = auto_align;
    const auto model1 = train_model1(corpus.pairs, options);
    for (const auto& p : corpus.pairs) alignments.push_back(viterbi_align(p, model1.table));
    std::ofstream links(out / "alignments.txt");
    write_alignments(links, alignments);
  }

  const std::string checkpoint = (out / "model.gamt").string();
  TrainHooks hooks;
  hooks.on_improvement = [&](const ModelState& state, const TrainState& ts) {
    save_checkpoint(checkpoint, state, sv, tv);
    std::fprintf(stderr, "step %zu: dev loss %.6f, checkpoint saved\n", ts.step, ts.best_dev);
  };
  const TrainResult result =
      train(corpus.pairs, dev, ModelState(rc.model_config(sv.size(), tv.size())), loss,
            rc.train_config(), alignments.empty() ? nullptr : &alignments, hooks);
  std::ofstream log(out / "train_log.tsv");
  write_log(log, result.log);
  if (result.clipped_steps > 0) {
    std::fprintf(stderr, "gradient clipping fired on %zu of %zu steps\n", result.clipped_steps,
                 result.train_state.step);
  }
  return 0;
}

// --- translate ---------------------------------------------------------

struct TranslateArgs {
  Common common;
  std::string model, in, attn_out;
};

int cmd_translate(const TranslateArgs& a) {
  const RunConfig rc = resolve(a.common);
  if (a.common.out.empty()) throw UsageError("--out FILE is required");
  require_file(a.model);
  require_file(a.in);
  refuse_overwrite(a.in, a.common.out);
  const Checkpoint ckpt = load_checkpoint(a.model);
  const std::size_t beam = rc.get_size("beam");
  if (beam == 0) throw ConfigError("beam must be at least 1");
  if (!a.attn_out.empty()) fs::create_directories(a.attn_out);

  std::vector<std::string> output;
  const auto lines = read_lines(a.in);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const Sentence source = tokenize(lines[k]);
    if (source.empty()) {
      output.emplace_back();
      continue;
    }
    const TokenIds ids = ckpt.source_vocab.encode(source);
    const Hypothesis h = beam == 1 ? greedy_decode(ckpt.state, ids)
                                   : beam_decode(ckpt.state, ids, beam);
    Sentence target = ckpt.target_vocab.decode(h.tokens);
    output.push_back(join_tokens(target));
    if (!a.attn_out.empty()) {
      if (h.finished) target.push_back(ckpt.target_vocab.token(Vocabulary::kEos));
      char name[32];
      std::snprintf(name, sizeof name, "%06zu.tsv", k + 1);
      std::ofstream(fs::path(a.attn_out) / name)
          << attention_tsv(h.attention_matrix(), source, target);
    }
  }
  write_lines(a.common.out, output);
  return 0;
}

// --- evaluate ----------------------------------------------------------

struct EvaluateArgs {
  Common common;
  std::string hyp, ref, metrics = "bleu,acc,wer,per,ter";
  bool tsv = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
  resolve(a.common);
  require_file(a.hyp);
  require_file(a.ref);
  const Corpus hyps = tokenized(read_lines(a.hyp)), refs = tokenized(read_lines(a.ref));
  std::vector<std::pair<std::string, double>> rows;
  std::stringstream names(a.metrics);
  for (std::string name; std::getline(names, name, ',');) {
    if (name == "bleu") {
      rows.emplace_back(name, bleu(hyps, refs));
    } else if (name == "acc") {
      rows.emplace_back(name, accuracy(hyps, refs));
    } else if (name == "wer") {
      rows.emplace_back(name, wer(hyps, refs));
    } else if (name == "per") {
      rows.emplace_back(name, per(hyps, refs));
    } else if (name == "ter") {
      rows.emplace_back(name, ter(hyps, refs));
    } else {
      throw UsageError("unknown metric '" + name + "' (expected bleu, acc, wer, per, ter)");
    }
  }
  std::ostringstream text;
  if (a.tsv) {
    text << "metric\tvalue\n";
    for (const auto& [name, value] : rows) text << name << '\t' << format_metric(value) << '\n';
  } else {
    char buf[64];
    for (const auto& [name, value] : rows) {
      std::snprintf(buf, sizeof buf, "%-5s %7s\n", name.c_str(), format_metric(value).c_str());
      text << buf;
    }
    text << "sentences " << hyps.size() << '\n';
  }
  if (a.common.out.empty()) {
    std::cout << text.str();
  } else {
    open_output(a.common.out) << text.str();
  }
  return 0;
}

// --- experiment --------------------------------------------------------

struct ExperimentArgs {
  Common common;
};

int cmd_experiment(const ExperimentArgs& a) {
  const RunConfig rc = resolve(a.common);
  if (a.common.out.empty()) throw UsageError("--out DIR is required");
  RawParallel data;
  if (!rc.get("src").empty() || !rc.get("tgt").empty()) {
    const std::string src = require_value(rc, "src"), tgt = require_value(rc, "tgt");
    require_file(src);
    require_file(tgt);
    data.source = read_lines(src);
    data.target = read_lines(tgt);
  } else {
    SyntheticOptions o;
    o.pairs = rc.get_size("pairs");
    o.word_types = rc.get_size("word_types");
    o.min_length = rc.get_size("min_len");
    o.max_length = rc.get_size("max_len");
    o.noise = rc.get_double("noise");
    o.swap_rate = rc.get_double("swap_rate");
    o.seed = rc.get_u64("seed");
    data = make_synthetic(o);
  }
  run_experiment(data, standard_arms(), rc, a.common.out);
  std::ifstream report(fs::path(a.common.out) / "report.tsv");
  std::cout << report.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guided-attention neural machine translation toolkit"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "normalize raw text, one sentence per line");
  add_common(p, pre.common, "output FILE");
  p->add_option("--in", pre.in, "raw input text")->required();
  p->add_option("--clitics", pre.clitics, "clitic lexicon TSV (default: built in)");
  p->add_option("--lang", pre.lang, "fa or en")->check(CLI::IsMember({"fa", "en"}));

  AlignArgs al;
  auto* l = app.add_subcommand("align", "IBM Model 1 word alignment");
  add_common(l, al.common, "DIR for table.tsv and links.txt");
  l->add_option("--src", al.src, "tokenized source file")->required();
  l->add_option("--tgt", al.tgt, "tokenized target file")->required();
  l->add_option("--iters", al.iters, "EM iterations")->capture_default_str();
  l->add_option("--out-table", al.table, "translation table TSV");
  l->add_option("--out-links", al.links, "Viterbi links, one line per pair");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model; writes model.gamt and train_log.tsv");
  add_common(t, tr.common, "output DIR");
  expose(t, tr.common,
         {"src", "tgt", "dev_src", "dev_tgt", "align", "auto_align", "omega", "layers", "hidden",
          "embed", "max_decode_factor", "src_vocab_max", "tgt_vocab_max", "lr0", "decay_factor",
          "patience", "epochs", "batch_size", "eval_every", "clip_norm"});
  t->add_flag("--guided", tr.guided, "add the guided-alignment penalty");

  TranslateArgs tl;
  auto* d = app.add_subcommand("translate", "decode a source file with a checkpoint");
  add_common(d, tl.common, "output FILE");
  d->add_option("--model", tl.model, "checkpoint file")->required();
  d->add_option("--in", tl.in, "tokenized source file")->required();
  d->add_option("--attn-out", tl.attn_out, "directory for per-sentence attention TSVs");
  expose(d, tl.common, {"beam"});

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "score hypotheses against references");
  add_common(e, ev.common, "write the report to FILE instead of stdout");
  e->add_option("--hyp", ev.hyp, "hypothesis file")->required();
  e->add_option("--ref", ev.ref, "reference file")->required();
  e->add_option("--metrics", ev.metrics, "comma-separated subset of bleu,acc,wer,per,ter");
  e->add_flag("--tsv", ev.tsv, "emit metric<TAB>value rows");

  ExperimentArgs ex;
  auto* x = app.add_subcommand("experiment", "2x2 {preprocessing, guided loss} comparison");
  add_common(x, ex.common, "output DIR");
  expose(x, ex.common,
         {"src", "tgt", "pairs", "word_types", "min_len", "max_len", "noise", "swap_rate",
          "test_fraction", "alignment", "auto_align", "omega", "layers", "hidden", "embed",
          "lr0", "epochs", "batch_size", "eval_every", "beam"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  }

  try {
    if (*p) return cmd_preprocess(pre);
    if (*l) return cmd_align(al);
    if (*t) return cmd_train(tr);
    if (*d) return cmd_translate(tl);
    if (*e) return cmd_evaluate(ev);
    if (*x) return cmd_experiment(ex);
  } catch (const UsageError& err) {
    std::cerr << "gamt: " << err.what() << '\n';
    return 2;
  } catch (const FormatError& err) {
    std::cerr << "gamt: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "gamt: internal error: " << err.what() << '\n';
    return 1;
  }
  return 1;
}
