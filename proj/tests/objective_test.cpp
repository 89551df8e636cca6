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

#include "gamt/error.hpp"
#include "gamt/objective.hpp"
#include "gradient_check.hpp"
#include "model_fixtures.hpp"

namespace gamt {
namespace {

using testing::random_model;
using testing::tiny_config;

AlignmentMatrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  return AlignmentMatrix::from_tensor(Tensor::matrix(rows));
}

double penalty_on_tape(const AlignmentMatrix& m, const AlignmentMatrix& a, double omega) {
  Tape t;
  return guided_penalty(m, t.constant(a.to_tensor()), omega).value().item();
}

TEST(GuidedPenalty, ZeroWhenEqual) {
  const auto m = matrix({{1, 0, 0}, {0, 0, 1}});
  EXPECT_EQ(penalty_on_tape(m, m, 0.2), 0.0);
  EXPECT_EQ(guided_penalty_value(m, m, 0.2), 0.0);
}

TEST(GuidedPenalty, HandExample) {
  const auto m = matrix({{1, 0}, {0, 1}});
  const auto a = matrix({{0.7, 0.3}, {0.2, 0.8}});
  EXPECT_EQ(penalty_on_tape(m, a, 0.2), 0.025);
  EXPECT_EQ(guided_penalty_value(m, a, 0.2), 0.025);
}

TEST(GuidedPenalty, LinearInOmega) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + rng.below(6), S = 1 + rng.below(6);
    AlignmentMatrix m(T, S), a(T, S);
    for (std::size_t i = 0; i < T; ++i) {
      m.set(i, rng.below(S), 1.0);
      for (std::size_t j = 0; j < S; ++j) a.set(i, j, rng.uniform());
    }
    const double base = penalty_on_tape(m, a, 0.2);
    EXPECT_NEAR(penalty_on_tape(m, a, 0.4), 2.0 * base, 1e-15);
    EXPECT_GE(base, 0.0);
    EXPECT_GT(base, 0.0);  // random a never equals m
  }
}

TEST(GuidedPenalty, MovingTowardReferenceNeverIncreases) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + rng.below(4), S = 1 + rng.below(4);
    AlignmentMatrix m(T, S), a(T, S);
    for (std::size_t i = 0; i < T; ++i) {
      m.set(i, rng.below(S), 1.0);
      for (std::size_t j = 0; j < S; ++j) a.set(i, j, rng.uniform());
    }
    const std::size_t i = rng.below(T), j = rng.below(S);
    AlignmentMatrix closer = a;
    closer.set(i, j, a(i, j) + rng.uniform() * (m(i, j) - a(i, j)));
    EXPECT_LE(guided_penalty_value(m, closer, 0.2), guided_penalty_value(m, a, 0.2));
  }
}

TEST(GuidedPenalty, GradientIsPiecewiseConstant) {
  const auto m = matrix({{1, 0, 0}, {0, 1, 0}});
  ParameterStore store;
  store.add("A", Tensor::matrix({{0.6, 0.3, 0.1}, {0.5, 0.2, 0.3}}));
  Tape t;
  Var loss = guided_penalty(m, t.parameter(store, 0), 0.2);
  Gradients g(store);
  t.backward(loss, g);
  const double k = 0.2 / (2.0 * 5.0);
  const std::vector<double> expected{-k, k, k, k, -k, k};
  for (std::size_t e = 0; e < 6; ++e) EXPECT_DOUBLE_EQ(g[0][e], expected[e]);
  auto value = [&](const ParameterStore& s) {
    Tape tp;
    return guided_penalty(m, tp.parameter(s, 0), 0.2).value().item();
  };
  EXPECT_TRUE(testing::check_gradients(store, g, value).empty());
}

TEST(GuidedPenalty, DimensionMismatchNamesShapes) {
  Tape t;
  try {
    guided_penalty(matrix({{1, 0}}), t.constant(Tensor::zeros({2, 2})), 0.2);
    FAIL();
  } catch (const ContractError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[1x2]"), std::string::npos);
    EXPECT_NE(msg.find("[2x2]"), std::string::npos);
  }
}

TEST(TotalLoss, BaselineAndZeroOmegaEqualNll) {
  const ModelState s(tiny_config(4));
  const SentencePair pair{{4, 5, 6}, {6, 5}};
  const auto m = matrix({{1, 0, 0}, {0, 1, 0}});
  Tape t0;
  ModelGraph g0(t0, s);
  const double nll = forward_teacher_forced(g0, pair).nll.value().item();

  Tape t1;
  ModelGraph g1(t1, s);
  const auto base = total_loss(g1, pair, nullptr, {0.2, false});
  EXPECT_EQ(base.total.value().item(), nll);
  EXPECT_FALSE(base.penalty.has_value());

  Tape t2;
  ModelGraph g2(t2, s);
  const auto zero = total_loss(g2, pair, &m, {0.0, true});
  EXPECT_EQ(zero.total.value().item(), nll);

  Tape t3;
  ModelGraph g3(t3, s);
  const auto guided = total_loss(g3, pair, &m, {0.2, true});
  EXPECT_GT(guided.total.value().item(), nll);
  const auto a = guided.forward.attention();
  AlignmentMatrix rows(2, 3);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) rows.set(i, j, a(i, j));
  }
  EXPECT_DOUBLE_EQ(guided.penalty->value().item(), guided_penalty_value(m, rows, 0.2));
}

TEST(TotalLoss, ConfigErrors) {
  const ModelState s(tiny_config());
  Tape t;
  ModelGraph g(t, s);
  const SentencePair pair{{4}, {5}};
  EXPECT_THROW(total_loss(g, pair, nullptr, {0.2, true}), ConfigError);
  EXPECT_THROW(total_loss(g, pair, nullptr, {-1.0, false}), ConfigError);
  const auto wrong = matrix({{1, 0}});
  EXPECT_THROW(total_loss(g, pair, &wrong, {0.2, true}), ContractError);
}

TEST(TotalLoss, GradientMatchesFiniteDifferences) {
  ModelState s = random_model(tiny_config(), 8, 0.5);
  const SentencePair pair{{4, 6, 5}, {5, 4, 6}};
  const auto m = matrix({{1, 0, 0}, {0, 0, 0}, {0, 0, 1}});
  for (bool guided : {false, true}) {
    const LossConfig cfg{0.2, guided};
    auto build = [&](Tape& t, const ParameterStore& p) {
      ModelState view(s.config(), p);
      ModelGraph g(t, view);
      return total_loss(g, pair, &m, cfg).total;
    };
    Tape t;
    Var loss = build(t, s.params());
    Gradients grads(s.params());
    t.backward(loss, grads);
    auto value = [&](const ParameterStore& p) {
      Tape tp;
      return build(tp, p).value().item();
    };
    const auto bad = testing::check_gradients(s.params(), grads, value);
    EXPECT_TRUE(bad.empty()) << (guided ? "guided" : "baseline") << ": " << bad.size()
                             << " mismatches";
  }
}

}  // namespace
}  // namespace gamt
