// Copyright 2026 The QLK-IRL Authors
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

#include "qlk_irl/learner.h"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "qlk_irl/demo_data.h"
#include "qlk_irl/envs/pacman.h"
#include "qlk_irl/error.h"
#include "qlk_irl/gradcheck.h"
#include "qlk_irl/level_inference.h"
#include "qlk_irl/solver.h"
#include "test_games.h"

namespace qlk_irl {
namespace {

// Two agents on a single state; every level uses the given policy rows.
LevelPolicySet FlatSet(const std::vector<double>& row0,
                       const std::vector<double>& row1) {
  LevelPolicySet set(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k <= 2; ++k) {
      auto t = std::make_shared<LevelTable>();
      t->num_states = 1;
      t->num_actions = static_cast<int>(i == 0 ? row0.size() : row1.size());
      t->policy = i == 0 ? row0 : row1;
      set.Set(i, k, t);
    }
  }
  return set;
}

Trajectory OneState(int steps, int a0, int a1) {
  Trajectory t;
  t.states.assign(steps, 0);
  t.joint_actions.assign(steps, {a0, a1});
  return t;
}

struct PacmanFixture {
  PacmanEnv env{DefaultPacmanConfig()};
  RewardModel truth{env.spec(), {3.0, 1.8, 0.6, 2.4, 1.2, 0.2}};
  Dataset demos;

  explicit PacmanFixture(int count = 2) {
    DemoConfig dc;
    dc.count = count;
    dc.max_steps = 20;
    dc.seed = 4;
    SolverConfig c;
    c.compute_gradients = false;
    demos = GenerateDemos(env, truth, c, dc);
  }
};

TEST_CASE("algorithm names") {
  CHECK(ParseAlgorithm("cognition-aware") == Algorithm::kCognitionAware);
  CHECK(ParseAlgorithm("pr2") == Algorithm::kPr2);
  CHECK(ParseAlgorithm("leader-follower") == Algorithm::kLeaderFollower);
  CHECK(AlgorithmName(Algorithm::kPr2) == "pr2");
  CHECK_THROWS_AS(ParseAlgorithm("qre"), ConfigError);
}

TEST_CASE("uniform policies give the closed-form likelihood") {
  const std::vector<double> u(5, 0.2);
  auto set = FlatSet(u, u);
  const std::vector<int> k{1, 2};
  for (int T : {0, 1, 7}) {
    CHECK(DemoLogLikGivenLevels(OneState(T, 3, 0), k, set) ==
          doctest::Approx(-2.0 * T * std::log(5.0)));
  }
  const std::vector<int> levels{1, 2};
  const std::vector<double> w{0, 0};
  Dataset d{OneState(4, 1, 2), OneState(6, 0, 0)};
  auto v = ExpectedLogLik(d, set, levels, w, 0.0, false);
  CHECK(v.loglik == doctest::Approx(-20.0 * std::log(5.0)));
}

TEST_CASE("single step product") {
  auto set = FlatSet({0.8, 0.2}, {0.5, 0.5});
  const std::vector<int> k{1, 1};
  CHECK(DemoLogLikGivenLevels(OneState(1, 0, 1), k, set) ==
        doctest::Approx(std::log(0.4)));
}

TEST_CASE("empty demonstration set leaves only the penalty") {
  GameSpec g = testing::RingGame();
  const std::vector<double> w{1.0, 0.5, 0.8, 0.3};
  LearnerConfig lc;
  lc.l2 = 0.25;
  auto v = ObjectiveAndGradient({}, g, w, SolverConfig{}, lc);
  CHECK(v.loglik == 0.0);
  CHECK(v.objective == doctest::Approx(-0.25 * (1 + 0.25 + 0.64 + 0.09)));
  for (int m = 0; m < 4; ++m) {
    CHECK(v.gradient[m] == doctest::Approx(-2 * 0.25 * w[m]));
  }
}

TEST_CASE("objective gradient matches finite differences on the ring") {
  GameSpec g = testing::RingGame();
  RewardModel truth(g, {1.0, 0.5, 0.8, 0.3});
  SolverConfig c;
  c.vi_tol = 1e-12;
  auto set = SolveAll(g, truth, c);
  std::vector<StochasticPolicy> pols{
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(0, 2).policy),
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(1, 1).policy)};
  Dataset demos{Rollout(g, pols, 3, 15, 1), Rollout(g, pols, 12, 15, 2)};
  LearnerConfig lc;
  const std::vector<double> at{0.6, 0.9, 0.4, 1.1};
  for (Algorithm a : {Algorithm::kCognitionAware, Algorithm::kPr2}) {
    lc.algorithm = a;
    const double err = CheckObjectiveGradient(demos, g, at, c, lc, 1e-5, 3);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("a single level reduces to the fixed-level likelihood") {
  GameSpec g = testing::RingGame();
  const std::vector<double> w{1.0, 0.5, 0.8, 0.3};
  SolverConfig c;
  c.k_max = 1;
  auto set = SolveAll(g, RewardModel(g, w), c);
  std::vector<StochasticPolicy> pols{
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(0, 1).policy),
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(1, 1).policy)};
  Dataset demos{Rollout(g, pols, 3, 15, 1)};
  LearnerConfig lc;
  lc.l2 = 0.0;
  auto v = ObjectiveAndGradient(demos, g, w, c, lc);
  const std::vector<int> k{1, 1};
  CHECK(v.loglik == doctest::Approx(DemoLogLikGivenLevels(demos[0], k, set)));
}

TEST_CASE("projected gradient drops blocked directions") {
  const std::vector<double> w{0.0, 0.0, 1.0};
  const std::vector<double> g{-1.0, 2.0, -3.0};
  CHECK(ProjectedGradient(w, g) == std::vector<double>{0.0, 2.0, -3.0});
}

TEST_CASE("initial weights are seeded and in range") {
  LearnerConfig lc;
  lc.seed = 9;
  auto a = InitialWeights(6, lc);
  auto b = InitialWeights(6, lc);
  CHECK(a == b);
  for (double x : a) {
    CHECK(x >= 0.1);
    CHECK(x <= 1.0);
  }
  lc.seed = 10;
  CHECK(InitialWeights(6, lc) != a);
}

TEST_CASE("zero learning rate never moves the weights") {
  GameSpec g = testing::RingGame();
  LearnerConfig lc;
  lc.eta = 0.0;
  lc.max_epochs = 5;
  lc.grad_tol = 0.0;
  auto res = Ascend(g, lc, [](std::span<const double> w) {
    ObjectiveValue v;
    v.gradient.assign(w.size(), 1.0);
    return v;
  });
  CHECK(res.records.size() == 5);
  for (const auto& r : res.records) CHECK(r.weights == res.records[0].weights);
}

TEST_CASE("divergence guard halves eta then gives up") {
  GameSpec g = testing::RingGame();
  LearnerConfig lc;
  lc.eta = 0.1;
  lc.max_epochs = 500;
  lc.grad_tol = 0.0;
  // Gradient points away from the optimum, so every step loses.
  auto wrong_way = [](std::span<const double> w) {
    ObjectiveValue v;
    for (double x : w) {
      v.objective -= x * x;
      v.gradient.push_back(1.0 + x);
    }
    return v;
  };
  CHECK_THROWS_AS(Ascend(g, lc, wrong_way), NonConvergenceError);
  lc.max_epochs = 25;
  auto res = Ascend(g, lc, wrong_way);
  CHECK(res.halvings == 2);
  CHECK(res.records.back().eta == doctest::Approx(0.025));
}

TEST_CASE("learner configuration validation") {
  LearnerConfig lc;
  lc.eta = -1.0;
  CHECK_THROWS_AS(lc.Validate(), ConfigError);
  lc = LearnerConfig{};
  lc.l2 = -0.1;
  CHECK_THROWS_AS(lc.Validate(), ConfigError);
  lc = LearnerConfig{};
  lc.max_epochs = 0;
  CHECK_THROWS_AS(lc.Validate(), ConfigError);
}

TEST_CASE("learn rejects inconsistent demonstrations") {
  GameSpec g = testing::RingGame();
  Trajectory bad;
  bad.states = {0, 24};
  bad.joint_actions = {{1, 1}, {1, 1}};
  CHECK_THROWS_AS(Learn({bad}, g, LearnerConfig{}, SolverConfig{}),
                  InputError);
}

TEST_CASE("ascent is non-decreasing with a small step on pacman") {
  PacmanFixture f;
  LearnerConfig lc;
  lc.eta = 1e-3;
  lc.max_epochs = 20;
  lc.seed = 2;
  auto res = Learn(f.demos, f.env.spec(), lc, SolverConfig{});
  REQUIRE(res.records.size() == 20);
  for (std::size_t e = 1; e < res.records.size(); ++e) {
    CHECK(res.records[e].objective >= res.records[e - 1].objective);
    for (double w : res.records[e].weights) CHECK(w >= 0.0);
  }
}

TEST_CASE("learning is bit-reproducible and matches across worker counts") {
  GameSpec g = testing::RingGame();
  RewardModel truth(g, {1.0, 0.5, 0.8, 0.3});
  SolverConfig c;
  DemoConfig dc;
  auto set = SolveAll(g, truth, c);
  std::vector<StochasticPolicy> pols{
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(0, 2).policy),
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(1, 1).policy)};
  Dataset demos;
  for (int d = 0; d < 4; ++d) demos.push_back(Rollout(g, pols, d * 5, 12, d));
  LearnerConfig lc;
  lc.eta = 0.05;
  lc.max_epochs = 8;
  lc.seed = 3;
  auto a = Learn(demos, g, lc, c);
  auto b = Learn(demos, g, lc, c);
  lc.workers = 3;
  auto w3 = Learn(demos, g, lc, c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t e = 0; e < a.records.size(); ++e) {
    CHECK(a.records[e].weights == b.records[e].weights);
    CHECK(a.records[e].loglik == b.records[e].loglik);
    CHECK(a.records[e].grad_norm == b.records[e].grad_norm);
    CHECK(a.records[e].weights == w3.records[e].weights);
  }
}

TEST_CASE("pr2 is cognition-aware learning capped at level one") {
  GameSpec g = testing::RingGame();
  RewardModel truth(g, {1.0, 0.5, 0.8, 0.3});
  SolverConfig c;
  auto set = SolveAll(g, truth, c);
  std::vector<StochasticPolicy> pols{
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(0, 1).policy),
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(1, 2).policy)};
  Dataset demos{Rollout(g, pols, 2, 15, 8), Rollout(g, pols, 19, 15, 9)};
  LearnerConfig lc;
  lc.eta = 0.05;
  lc.max_epochs = 6;
  lc.algorithm = Algorithm::kPr2;
  auto pr2 = Learn(demos, g, lc, c);
  lc.algorithm = Algorithm::kCognitionAware;
  SolverConfig c1 = c;
  c1.k_max = 1;
  auto capped = Learn(demos, g, lc, c1);
  REQUIRE(pr2.records.size() == capped.records.size());
  for (std::size_t e = 0; e < pr2.records.size(); ++e) {
    CHECK(pr2.records[e].weights == capped.records[e].weights);
    CHECK(pr2.records[e].loglik == capped.records[e].loglik);
  }
}

TEST_CASE("objective is unchanged under feature and weight rescaling") {
  GameSpec g = testing::RingGame();
  const std::vector<double> w{1.0, 0.5, 0.8, 0.3};
  SolverConfig c;
  c.vi_tol = 1e-12;
  auto set = SolveAll(g, RewardModel(g, w), c);
  std::vector<StochasticPolicy> pols{
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(0, 2).policy),
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(1, 1).policy)};
  Dataset demos{Rollout(g, pols, 4, 15, 3)};
  const double scale = 0.25;
  GameSpec scaled = g;
  for (double& f : scaled.features[0]) f *= scale;
  std::vector<double> ws = w;
  ws[0] /= scale;
  ws[1] /= scale;
  LearnerConfig lc;
  lc.l2 = 0.0;
  auto a = ObjectiveAndGradient(demos, g, w, c, lc);
  auto b = ObjectiveAndGradient(demos, scaled, ws, c, lc);
  CHECK(std::abs(a.loglik - b.loglik) <= 1e-10);
  // The gradient transforms covariantly: dL/dw_scaled = c * dL/dw.
  for (int m = 0; m < 2; ++m) {
    CHECK(std::abs(b.gradient[m] - scale * a.gradient[m]) <= 1e-10);
  }
}

}  // namespace
}  // namespace qlk_irl
