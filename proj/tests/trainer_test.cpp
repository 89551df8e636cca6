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
#include <sstream>

#include "gamt/error.hpp"
#include "gamt/trainer.hpp"
#include "model_fixtures.hpp"

namespace gamt {
namespace {

using testing::random_ids;
using testing::tiny_config;

std::vector<double> lr_trace(const std::vector<double>& dev_losses, const TrainConfig& config) {
  TrainState s = TrainState::initial(config);
  std::vector<double> lrs;
  for (const double d : dev_losses) {
    maybe_decay(s, d, config);
    lrs.push_back(s.lr);
  }
  return lrs;
}

TEST(MaybeDecay, ImprovingLossNeverDecays) {
  EXPECT_EQ(lr_trace({3.0, 2.9, 2.8, 2.7}, {}), (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
}

TEST(MaybeDecay, FiresAfterPatienceEvaluations) {
  EXPECT_EQ(lr_trace({2.0, 2.1, 2.2, 2.3}, {}), (std::vector<double>{0.5, 0.5, 0.5, 0.25}));
}

TEST(MaybeDecay, WindowResetsAfterDecay) {
  const auto lrs = lr_trace({2.0, 2.1, 2.2, 2.3, 2.4, 2.5, 2.6, 2.7}, {});
  EXPECT_EQ(lrs, (std::vector<double>{0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25, 0.125}));
}

TEST(MaybeDecay, LrIsAlwaysAPowerOfTheFactor) {
  Rng rng(3);
  TrainConfig config;
  config.decay_factor = 0.7;
  config.patience = 2;
  TrainState s = TrainState::initial(config);
  double previous = s.lr;
  for (int i = 0; i < 500; ++i) {
    maybe_decay(s, rng.uniform(1.0, 2.0), config);
    EXPECT_LE(s.lr, previous);
    EXPECT_GT(s.lr, 0.0);
    double expected = config.lr0;
    for (std::size_t k = 0; k < s.decays; ++k) expected *= config.decay_factor;
    EXPECT_EQ(s.lr, expected);
    previous = s.lr;
  }
  EXPECT_GT(s.decays, 0u);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  for (double f : {0.0, 1.0, 1.5}) {
    TrainConfig bad;
    bad.decay_factor = f;
    EXPECT_THROW(bad.validate(), ConfigError);
  }
  TrainConfig bad;
  bad.patience = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.lr0 = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

ParameterStore scalar_store(double p) {
  ParameterStore store;
  store.add("p", Tensor::scalar(p));
  return store;
}

TEST(SgdStep, ScalarArithmetic) {
  ParameterStore store = scalar_store(1.0);
  Gradients g(store);
  g[0][0] = 2.0;
  EXPECT_FALSE(sgd_step(store, g, 0.1, 5.0));
  EXPECT_DOUBLE_EQ(store.value(0).item(), 0.8);
}

TEST(SgdStep, ZeroLearningRateLeavesParametersBitwise) {
  ModelState s(tiny_config());
  const ModelState before = s;
  Gradients g(s.params());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (double& v : g[i]) v = 0.3;
  }
  sgd_step(s.params(), g, 0.0, 5.0);
  for (std::size_t i = 0; i < s.params().size(); ++i) {
    EXPECT_TRUE(s.params().value(i).identical(before.params().value(i)));
  }
}

TEST(SgdStep, ClipsToGlobalNorm) {
  ParameterStore store;
  store.add("a", Tensor::matrix({{0.0, 0.0}}));
  store.add("b", Tensor::scalar(0.0));
  Gradients g(store);
  g[0][0] = 30.0;
  g[0][1] = 0.0;
  g[1][0] = 40.0;
  EXPECT_TRUE(sgd_step(store, g, 1.0, 5.0));
  EXPECT_DOUBLE_EQ(store.value(0)[0], -3.0);
  EXPECT_DOUBLE_EQ(store.value(1)[0], -4.0);
}

TEST(SgdStep, NonFiniteGradientNamesParameterAndStep) {
  ModelState s(tiny_config());
  Gradients g(s.params());
  const std::size_t victim = s.params().index("attention.v");
  g[victim][1] = std::nan("");
  try {
    sgd_step(s.params(), g, 0.1, 5.0, 17);
    FAIL();
  } catch (const TrainingError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("attention.v"), std::string::npos) << msg;
    EXPECT_NE(msg.find("step 17"), std::string::npos) << msg;
  }
}

std::vector<SentencePair> random_pairs(std::uint64_t seed, std::size_t n, std::size_t vocab) {
  Rng rng(seed);
  std::vector<SentencePair> pairs;
  for (std::size_t k = 0; k < n; ++k) {
    pairs.push_back({random_ids(rng, 1 + rng.below(4), vocab),
                     random_ids(rng, 1 + rng.below(4), vocab)});
  }
  return pairs;
}

TEST(BatchLoss, SingletonEqualsTotalLoss) {
  const ModelState s = testing::random_model(tiny_config(), 5, 0.5);
  const auto pairs = random_pairs(5, 6, 7);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Tape t;
    ModelGraph g(t, s);
    const double expected = total_loss(g, pairs[k], nullptr, {}).total.value().item();
    const std::size_t idx[] = {k};
    EXPECT_EQ(batch_loss(s, pairs, idx, nullptr, {}, nullptr), expected);
  }
}

TEST(BatchLoss, GradientIsMeanOfPairGradients) {
  const ModelState s = testing::random_model(tiny_config(), 6, 0.5);
  const auto pairs = random_pairs(6, 3, 7);
  const std::size_t all[] = {0, 1, 2};
  Gradients mean(s.params());
  batch_loss(s, pairs, all, nullptr, {}, &mean);
  Gradients sum(s.params());
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t one[] = {k};
    batch_loss(s, pairs, one, nullptr, {}, &sum);
  }
  for (std::size_t i = 0; i < mean.size(); ++i) {
    for (std::size_t e = 0; e < mean[i].size(); ++e) {
      EXPECT_NEAR(mean[i][e], sum[i][e] / 3.0, 1e-12);
    }
  }
}

ModelConfig small_config() {
  ModelConfig c = tiny_config(2);
  c.hidden_size = 16;
  c.embed_size = 8;
  return c;
}

TEST(Train, MemorizesASinglePair) {
  const std::vector<SentencePair> pairs{{{4, 5, 6}, {6, 4}}};
  TrainConfig config;
  config.epochs = 300;
  config.batch_size = 1;
  config.eval_every = 50;
  const auto result = train(pairs, pairs, ModelState(small_config()), {}, config);
  EXPECT_LT(nll_per_token(result.state, pairs), 1e-2);
  EXPECT_EQ(greedy_decode(result.state, pairs[0].source).tokens, pairs[0].target);
}

TEST(Train, SameSeedGivesIdenticalLogAndParameters) {
  const auto pairs = random_pairs(8, 12, 7);
  TrainConfig config;
  config.epochs = 4;
  config.batch_size = 3;
  config.eval_every = 2;
  auto run = [&] {
    const auto r = train(pairs, {}, ModelState(small_config()), {}, config);
    std::ostringstream log;
    write_log(log, r.log);
    return std::make_pair(log.str(), r.state);
  };
  const auto [log_a, state_a] = run();
  const auto [log_b, state_b] = run();
  EXPECT_EQ(log_a, log_b);
  for (std::size_t i = 0; i < state_a.params().size(); ++i) {
    EXPECT_TRUE(state_a.params().value(i).identical(state_b.params().value(i)));
  }
  EXPECT_EQ(log_a.substr(0, log_a.find('\n')), "step\ttrain_loss\tdev_loss\tlr");
}

TEST(Train, BaselineIgnoresOmega) {
  const auto pairs = random_pairs(9, 8, 7);
  TrainConfig config;
  config.epochs = 2;
  config.batch_size = 2;
  const auto a = train(pairs, {}, ModelState(small_config()), {0.2, false}, config);
  const auto b = train(pairs, {}, ModelState(small_config()), {7.5, false}, config);
  for (std::size_t i = 0; i < a.state.params().size(); ++i) {
    EXPECT_TRUE(a.state.params().value(i).identical(b.state.params().value(i)));
  }
}

TEST(Train, LogAndHooks) {
  const auto pairs = random_pairs(10, 10, 7);
  TrainConfig config;
  config.epochs = 5;
  config.batch_size = 4;  // 3 steps per epoch
  config.eval_every = 4;
  std::size_t improvements = 0, epochs = 0;
  TrainHooks hooks;
  hooks.on_improvement = [&](const ModelState&, const TrainState&) { ++improvements; };
  hooks.on_epoch_end = [&](const ModelState&, const TrainState& ts) {
    ++epochs;
    return ts.epoch < 3;
  };
  const auto r = train(pairs, {}, ModelState(small_config()), {}, config, nullptr, hooks);
  EXPECT_EQ(epochs, 4u);
  EXPECT_EQ(r.train_state.step, 12u);
  ASSERT_EQ(r.log.size(), 3u);
  EXPECT_EQ(r.log[0].step, 4u);
  EXPECT_EQ(r.log[2].step, 12u);
  EXPECT_GE(improvements, 1u);
  for (std::size_t k = 1; k < r.log.size(); ++k) EXPECT_LE(r.log[k].lr, r.log[k - 1].lr);
}

TEST(Train, GuidedNeedsMatchingAlignments) {
  const auto pairs = random_pairs(11, 4, 7);
  TrainConfig config;
  config.epochs = 1;
  const LossConfig guided{0.2, true};
  EXPECT_THROW(train(pairs, {}, ModelState(small_config()), guided, config), ConfigError);
  std::vector<AlignmentMatrix> too_few(3, AlignmentMatrix(1, 1));
  EXPECT_THROW(train(pairs, {}, ModelState(small_config()), guided, config, &too_few),
               InputError);
  std::vector<AlignmentMatrix> ok;
  for (const auto& p : pairs) ok.emplace_back(p.target.size(), p.source.size());
  EXPECT_NO_THROW(train(pairs, {}, ModelState(small_config()), guided, config, &ok));
  EXPECT_THROW(train({}, {}, ModelState(small_config()), {}, config), InputError);
}

}  // namespace
}  // namespace gamt
