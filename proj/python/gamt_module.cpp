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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gamt/checkpoint.hpp"
#include "gamt/error.hpp"
#include "gamt/experiment.hpp"
#include "gamt/metrics.hpp"
#include "gamt/preprocess.hpp"
#include "gamt/run_config.hpp"

namespace py = pybind11;
using namespace gamt;

namespace {

RunConfig config_from(const py::kwargs& kwargs) {
  RunConfig rc;
  for (const auto& [key, value] : kwargs) {
    const std::string k = py::str(key);
    if (py::isinstance<py::bool_>(value)) {
      rc.set(k, value.cast<bool>() ? "true" : "false");
    } else {
      rc.set(k, py::str(value));
    }
  }
  return rc;
}

Corpus tokenized(const std::vector<std::string>& lines) {
  Corpus c;
  for (const auto& l : lines) c.push_back(tokenize(l));
  return c;
}

Hypothesis decode(const Checkpoint& m, const std::string& line, std::size_t beam) {
  const TokenIds ids = m.source_vocab.encode(tokenize(line));
  if (ids.empty()) throw InputError("cannot translate an empty sentence");
  if (beam == 0) throw ConfigError("beam must be at least 1");
  return beam == 1 ? greedy_decode(m.state, ids) : beam_decode(m.state, ids, beam);
}

std::vector<std::vector<double>> rows_of(const AlignmentMatrix& a) {
  std::vector<std::vector<double>> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out[i].push_back(a(i, j));
  }
  return out;
}

AlignmentMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  AlignmentMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DimensionError("ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

py::dict config_dict(const ModelConfig& c) {
  py::dict d;
  d["layers"] = c.num_layers;
  d["hidden"] = c.hidden_size;
  d["embed"] = c.embed_size;
  d["src_vocab_size"] = c.src_vocab_size;
  d["tgt_vocab_size"] = c.tgt_vocab_size;
  d["max_decode_factor"] = c.max_decode_factor;
  d["seed"] = c.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gamt, m) {
  m.doc() = "Guided-attention neural machine translation toolkit.";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<UsageError> usage(m, "UsageError", error.ptr());
  static py::exception<FormatError> format(m, "FormatError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      py::set_error(usage, e.what());
    } catch (const FormatError& e) {
      py::set_error(format, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "preprocess",
      [](const std::string& text, const std::string& lang, const std::string& clitics) {
        PreprocessConfig config;
        Language language = Language::kPersian;
        if (lang == "en") {
          language = Language::kEnglish;
          config.sentence_terminators = {U'.', U'!', U'?'};
        } else if (lang != "fa") {
          throw UsageError("lang must be fa or en");
        }
        config.clitics = clitics.empty() ? CliticLexicon::builtin() : CliticLexicon::load(clitics);
        return preprocess(text, config, language);
      },
      py::arg("text"), py::arg("lang") = "fa", py::arg("clitics") = "",
      "Normalize raw text; returns one string per sentence.");

  m.def(
      "align",
      [](const std::vector<std::string>& src, const std::vector<std::string>& tgt,
         std::size_t iterations) {
        const ParallelCorpus c = make_parallel(src, tgt);
        const Model1Result r = train_model1(c.pairs, {iterations, true});
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> links;
        for (const auto& p : c.pairs) links.push_back(viterbi_align(p, r.table).links());
        return py::make_tuple(links, r.log_likelihood);
      },
      py::arg("src"), py::arg("tgt"), py::arg("iterations") = 5,
      "IBM Model 1 Viterbi links as (source j, target i) pairs, plus the log-likelihood trace.");

  m.def(
      "guided_penalty",
      [](const std::vector<std::vector<double>>& reference,
         const std::vector<std::vector<double>>& attention, double omega) {
        return guided_penalty_value(matrix_of(reference), matrix_of(attention), omega);
      },
      py::arg("reference"), py::arg("attention"), py::arg("omega") = 0.2);

  m.def("bleu", [](const std::vector<std::string>& h, const std::vector<std::string>& r) {
    return bleu(tokenized(h), tokenized(r));
  });
  m.def("accuracy", [](const std::vector<std::string>& h, const std::vector<std::string>& r) {
    return accuracy(tokenized(h), tokenized(r));
  });
  m.def("wer", [](const std::vector<std::string>& h, const std::vector<std::string>& r) {
    return wer(tokenized(h), tokenized(r));
  });
  m.def("per", [](const std::vector<std::string>& h, const std::vector<std::string>& r) {
    return per(tokenized(h), tokenized(r));
  });
  m.def("ter", [](const std::vector<std::string>& h, const std::vector<std::string>& r) {
    return ter(tokenized(h), tokenized(r));
  });
  m.def(
      "evaluate",
      [](const std::vector<std::string>& h, const std::vector<std::string>& r) {
        const MetricReport x = evaluate(tokenized(h), tokenized(r));
        py::dict d;
        d["bleu"] = x.bleu;
        d["accuracy"] = x.accuracy;
        d["wer"] = x.wer;
        d["per"] = x.per;
        d["ter"] = x.ter;
        d["sentences"] = x.sentences;
        return d;
      },
      py::arg("hyps"), py::arg("refs"));

  py::class_<Checkpoint>(m, "Model")
      .def_static("load", &load_checkpoint, py::arg("path"))
      .def("save",
           [](const Checkpoint& c, const std::string& path) {
             save_checkpoint(path, c.state, c.source_vocab, c.target_vocab);
           })
      .def_property_readonly("config", [](const Checkpoint& c) { return config_dict(c.state.config()); })
      .def(
          "translate",
          [](const Checkpoint& c, const std::string& line, std::size_t beam) {
            return join_tokens(c.target_vocab.decode(decode(c, line, beam).tokens));
          },
          py::arg("line"), py::arg("beam") = 1)
      .def(
          "attention",
          [](const Checkpoint& c, const std::string& line, std::size_t beam) {
            return rows_of(decode(c, line, beam).attention_matrix());
          },
          py::arg("line"), py::arg("beam") = 1,
          "Attention rows of the decoded hypothesis, EOS row included when produced.");

  m.def(
      "train",
      [](const std::vector<std::string>& src, const std::vector<std::string>& tgt,
         const py::kwargs& kwargs) {
        const RunConfig rc = config_from(kwargs);
        const ParallelCorpus c = make_parallel(src, tgt);
        const LossConfig loss = rc.loss_config();
        std::vector<AlignmentMatrix> alignments;
        if (loss.guided) {
          Model1Options options;
          if (const std::size_t n = rc.get_size("auto_align"); n > 0) options.iterations = n;
          const auto model1 = train_model1(c.pairs, options);
          for (const auto& p : c.pairs) alignments.push_back(viterbi_align(p, model1.table));
        }
        const auto run = [&] {
          py::gil_scoped_release release;
          return train(c.pairs, {},
                       ModelState(rc.model_config(c.source_vocab.size(), c.target_vocab.size())),
                       loss, rc.train_config(), loss.guided ? &alignments : nullptr);
        };
        TrainResult r = run();
        std::vector<py::dict> log;
        for (const auto& row : r.log) {
          py::dict d;
          d["step"] = row.step;
          d["train_loss"] = row.train_loss;
          d["dev_loss"] = row.dev_loss;
          d["lr"] = row.lr;
          log.push_back(d);
        }
        return py::make_tuple(Checkpoint{std::move(r.state), c.source_vocab, c.target_vocab},
                              log);
      },
      py::arg("src"), py::arg("tgt"),
      "Train on parallel lines; keyword arguments are run-config keys (hidden=16, guided=True, ...). "
      "Guided training aligns with IBM Model 1 first. Returns (model, log).");

  m.def(
      "make_synthetic",
      [](std::size_t pairs, std::size_t word_types, double noise, double swap_rate,
         std::uint64_t seed) {
        SyntheticOptions o;
        o.pairs = pairs;
        o.word_types = word_types;
        o.noise = noise;
        o.swap_rate = swap_rate;
        o.seed = seed;
        const RawParallel d = make_synthetic(o);
        return py::make_tuple(d.source, d.target);
      },
      py::arg("pairs") = 500, py::arg("word_types") = 24, py::arg("noise") = 0.3,
      py::arg("swap_rate") = 0.0, py::arg("seed") = 1);
}
