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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gamt/aligner.hpp"
#include "gamt/error.hpp"
#include "gamt/random.hpp"

namespace gamt {
namespace {

ParallelCorpus classic_corpus() {
  return make_parallel({"das Haus", "das Buch", "ein Buch"}, {"the house", "the book", "a book"});
}

// Hand EM over strings, written directly from the Model 1 update equations.
std::map<std::pair<std::string, std::string>, double> oracle_em(
    const std::vector<std::pair<Sentence, Sentence>>& corpus, int iterations, bool use_null) {
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto& [s, t] : corpus) {
    auto src = s;
    if (use_null) src.push_back("NULL");
    for (const auto& x : src) cooc[x].insert(t.begin(), t.end());
  }
  std::map<std::pair<std::string, std::string>, double> t;  // (x, y)
  for (const auto& [x, ys] : cooc) {
    for (const auto& y : ys) t[{x, y}] = 1.0 / static_cast<double>(ys.size());
  }
  for (int it = 0; it < iterations; ++it) {
    std::map<std::pair<std::string, std::string>, double> c;
    std::map<std::string, double> total;
    for (const auto& [s, tgt] : corpus) {
      auto src = s;
      if (use_null) src.push_back("NULL");
      for (const auto& y : tgt) {
        double d = 0.0;
        for (const auto& x : src) d += t[{x, y}];
        for (const auto& x : src) c[{x, y}] += t[{x, y}] / d;
      }
    }
    for (const auto& [k, v] : c) total[k.first] += v;
    for (auto& [k, v] : c) v /= total[k.first];
    t = c;
  }
  return t;
}

double table_prob(const ParallelCorpus& c, const TranslationTable& t, const std::string& y,
                  const std::string& x) {
  const std::size_t xs = x == "NULL" ? TranslationTable::kNull : c.source_vocab.id(x);
  return t.prob(c.target_vocab.id(y), xs);
}

TEST(Model1, SinglePairAnalytic) {
  const auto c = make_parallel({"das"}, {"the"});
  for (bool use_null : {true, false}) {
    const auto r = train_model1(c.pairs, {1, use_null});
    EXPECT_DOUBLE_EQ(table_prob(c, r.table, "the", "das"), 1.0);
    const auto post = link_posterior(c.pairs[0], 0, r.table, use_null);
    if (use_null) {
      ASSERT_EQ(post.size(), 2u);
      EXPECT_DOUBLE_EQ(post[0], 0.5);
      EXPECT_DOUBLE_EQ(post[1], 0.5);
      EXPECT_DOUBLE_EQ(table_prob(c, r.table, "the", "NULL"), 1.0);
    } else {
      EXPECT_EQ(post, std::vector<double>{1.0});
    }
  }
}

TEST(Model1, ClassicCorpusMatchesHandOracle) {
  const auto c = classic_corpus();
  std::vector<std::pair<Sentence, Sentence>> strings = {
      {{"das", "Haus"}, {"the", "house"}}, {{"das", "Buch"}, {"the", "book"}},
      {{"ein", "Buch"}, {"a", "book"}}};
  for (bool use_null : {true, false}) {
    const auto r = train_model1(c.pairs, {5, use_null});
    const auto oracle = oracle_em(strings, 5, use_null);
    EXPECT_EQ(r.table.size(), oracle.size());
    for (const auto& [key, p] : oracle) {
      EXPECT_NEAR(table_prob(c, r.table, key.second, key.first), p, 1e-12)
          << key.first << " -> " << key.second;
    }
  }
  const auto r = train_model1(c.pairs, {5, true});
  // Frozen from an independent Python run of the same updates.
  EXPECT_NEAR(table_prob(c, r.table, "the", "das"), 0.8653099408028264, 1e-12);
  EXPECT_NEAR(table_prob(c, r.table, "house", "das"), 0.09556097767195063, 1e-12);
  EXPECT_GT(table_prob(c, r.table, "the", "das"), table_prob(c, r.table, "book", "das"));
  EXPECT_GT(table_prob(c, r.table, "the", "das"), table_prob(c, r.table, "house", "das"));
  std::string best;
  double best_p = -1.0;
  for (const auto& y : c.target_vocab.user_tokens()) {
    const double p = table_prob(c, r.table, y, "Buch");
    if (p > best_p) best_p = p, best = y;
  }
  EXPECT_EQ(best, "book");
}

TEST(Model1, ZeroIterationsReturnsUniformTable) {
  const auto c = classic_corpus();
  const auto r = train_model1(c.pairs, {0, true});
  EXPECT_EQ(r.log_likelihood.size(), 1u);
  EXPECT_DOUBLE_EQ(table_prob(c, r.table, "the", "das"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(table_prob(c, r.table, "the", "NULL"), 0.25);
  EXPECT_EQ(r.table.entries(), model1_uniform_table(c.pairs).entries());
}

TEST(Model1, RejectsEmptyCorpus) {
  EXPECT_THROW(train_model1({}, {}), InputError);
  std::vector<SentencePair> bad{{{4}, {}}};
  EXPECT_THROW(train_model1(bad, {}), InputError);
}

std::vector<SentencePair> random_pairs(Rng& rng) {
  std::vector<SentencePair> pairs(1 + rng.below(8));
  for (auto& p : pairs) {
    p.source.resize(1 + rng.below(5));
    p.target.resize(1 + rng.below(5));
    for (auto& x : p.source) x = 4 + rng.below(6);
    for (auto& y : p.target) y = 4 + rng.below(6);
  }
  return pairs;
}

TEST(Model1Properties, LikelihoodMonotoneAndNormalized) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pairs = random_pairs(rng);
    const bool use_null = trial % 2 == 0;
    const auto r = train_model1(pairs, {8, use_null});
    for (std::size_t k = 1; k < r.log_likelihood.size(); ++k) {
      EXPECT_GE(r.log_likelihood[k], r.log_likelihood[k - 1] - 1e-12) << "trial " << trial;
    }
    std::map<std::size_t, double> sums;
    for (const auto& [key, p] : r.table.entries()) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      sums[key.first] += p;
    }
    for (const auto& [x, s] : sums) EXPECT_NEAR(s, 1.0, 1e-9);
    for (const auto& p : pairs) EXPECT_TRUE(viterbi_align(p, r.table, use_null).is_hard());
  }
}

TEST(Viterbi, ForcedAndClassic) {
  const auto single = make_parallel({"x"}, {"y"});
  TranslationTable t;
  t.set(single.target_vocab.id("y"), single.source_vocab.id("x"), 1.0);
  const auto m = viterbi_align(single.pairs[0], t);
  EXPECT_EQ(m.rows(), 1u);
  EXPECT_EQ(m(0, 0), 1.0);

  const auto c = classic_corpus();
  const auto r = train_model1(c.pairs, {5, true});
  const auto a = viterbi_align(c.pairs[1], r.table);  // das Buch / the book
  EXPECT_EQ(a.links(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
}

TEST(Viterbi, NullWinnerGivesZeroRowAndTiesPickSmallestIndex) {
  const auto c = make_parallel({"a b"}, {"y z"});
  const auto y = c.target_vocab.id("y"), z = c.target_vocab.id("z");
  const auto a = c.source_vocab.id("a"), b = c.source_vocab.id("b");
  TranslationTable t;
  t.set(y, a, 0.1);
  t.set(y, b, 0.1);
  t.set(y, TranslationTable::kNull, 0.9);
  t.set(z, a, 0.3);
  t.set(z, b, 0.3);
  t.set(z, TranslationTable::kNull, 0.3);
  const auto m = viterbi_align(c.pairs[0], t);
  EXPECT_EQ(m(0, 0) + m(0, 1), 0.0);
  EXPECT_EQ(m(1, 0), 1.0);
  EXPECT_EQ(m(1, 1), 0.0);
}

TEST(Viterbi, UnseenWordsUseFloor) {
  const auto c = make_parallel({"a b"}, {"q"});
  const auto m = viterbi_align(c.pairs[0], TranslationTable{});
  EXPECT_EQ(m(0, 0), 1.0);  // all tie at the floor; NULL does not beat it
}

TEST(ImportAlignments, ParsesAndValidates) {
  const auto c = make_parallel({"a b", "a b", "a b"}, {"x y", "x y", "x y"});
  std::istringstream in("0-0 1-1\n\n1-0 0-0\n");
  const auto ms = import_alignments(in, c.pairs);
  ASSERT_EQ(ms.size(), 3u);
  EXPECT_EQ(ms[0].to_tensor().data()[0], 1.0);
  EXPECT_TRUE(ms[0].to_tensor().identical(Tensor::matrix({{1, 0}, {0, 1}})));
  EXPECT_TRUE(ms[1].to_tensor().identical(Tensor::zeros({2, 2})));
  EXPECT_TRUE(ms[2].to_tensor().identical(Tensor::matrix({{1, 1}, {0, 0}})));
  EXPECT_FALSE(ms[2].is_hard());

  std::istringstream bad("0-0\n5-0\n\n");
  try {
    import_alignments(bad, c.pairs);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream short_file("0-0\n");
  EXPECT_THROW(import_alignments(short_file, c.pairs), InputError);
  std::istringstream garbage("0:0\n\n\n");
  EXPECT_THROW(import_alignments(garbage, c.pairs), ParseError);
}

TEST(ImportAlignments, RoundTripIsExact) {
  Rng rng(5);
  std::vector<SentencePair> pairs;
  std::vector<AlignmentMatrix> ms;
  for (int k = 0; k < 50; ++k) {
    SentencePair p{TokenIds(1 + rng.below(6), 4), TokenIds(1 + rng.below(6), 4)};
    AlignmentMatrix m(p.target.size(), p.source.size());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (rng.bernoulli(0.3)) m.set(i, j, 1.0);
      }
    }
    pairs.push_back(p);
    ms.push_back(m);
  }
  std::stringstream first;
  write_alignments(first, ms);
  const auto back = import_alignments(first, pairs);
  EXPECT_EQ(back, ms);
  std::stringstream second;
  write_alignments(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(TranslationTable, SerializationRoundTrip) {
  const auto c = classic_corpus();
  const auto r = train_model1(c.pairs, {5, true});
  std::stringstream ss;
  r.table.save(ss, c.source_vocab, c.target_vocab);
  EXPECT_NE(ss.str().find("NULL\tthe\t"), std::string::npos);
  const auto back = TranslationTable::load(ss, c.source_vocab, c.target_vocab);
  EXPECT_EQ(back.entries(), r.table.entries());
}

}  // namespace
}  // namespace gamt
