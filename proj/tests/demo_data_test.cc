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

#include "qlk_irl/demo_data.h"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "qlk_irl/envs/pacman.h"
#include "qlk_irl/error.h"
#include "qlk_irl/solver.h"
#include "qlk_irl/trajectory_io.h"
#include "test_games.h"

namespace qlk_irl {
namespace {

// A ring game dressed up as an environment.
class RingEnv : public Environment {
 public:
  RingEnv() : spec_(testing::RingGame()) {}
  std::string id() const override { return "ring"; }
  const GameSpec& spec() const override { return spec_; }
  double dt() const override { return 1.0; }
  std::vector<double> PhysicalState(int s) const override {
    return {static_cast<double>(s / 5), static_cast<double>(s % 5)};
  }
  std::string ActionName(int, int a) const override {
    return std::to_string(a);
  }
  std::string DescribeState(int s) const override { return std::to_string(s); }

 private:
  GameSpec spec_;
};

const std::vector<double> kRingWeights{1.0, 0.5, 0.8, 0.3};

TEST_CASE("generation is reproducible and seed dependent") {
  RingEnv env;
  RewardModel truth(env.spec(), kRingWeights);
  DemoConfig dc;
  dc.count = 6;
  dc.max_steps = 15;
  dc.seed = 12;
  SolverConfig c;
  c.compute_gradients = false;
  const Dataset a = GenerateDemos(env, truth, c, dc);
  dc.workers = 3;
  const Dataset b = GenerateDemos(env, truth, c, dc);
  dc.seed = 13;
  const Dataset other = GenerateDemos(env, truth, c, dc);
  std::stringstream sa, sb, so;
  WriteDataset(sa, a);
  WriteDataset(sb, b);
  WriteDataset(so, other);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != so.str());
}

TEST_CASE("metadata and dynamics") {
  PacmanEnv env(DefaultPacmanConfig());
  RewardModel truth(env.spec(), {3.0, 1.8, 0.6, 2.4, 1.2, 0.2});
  DemoConfig dc;
  dc.count = 5;
  dc.max_steps = 30;
  dc.min_length = 6;
  dc.assignment = LevelAssignment::kFixed;
  dc.fixed_levels = {2, 1};
  SolverConfig c;
  c.compute_gradients = false;
  const Dataset demos = GenerateDemos(env, truth, c, dc);
  REQUIRE(demos.size() == 5);
  for (const auto& d : demos) {
    CHECK(d.env_id == "pacman");
    CHECK(d.dt == 1.0);
    CHECK(*d.gt_levels == std::vector<int>{2, 1});
    CHECK(*d.gt_weights == truth.Blocks());
    CHECK(d.size() >= 6);
    CHECK(d.size() <= 30);
    CHECK_NOTHROW(CheckTrajectory(env.spec(), d));
    CHECK_FALSE(env.spec().IsTerminal(d.states.front()));
  }
}

TEST_CASE("levels above the solved range are rejected") {
  RingEnv env;
  RewardModel truth(env.spec(), kRingWeights);
  SolverConfig c;
  c.compute_gradients = false;
  c.k_max = 1;
  auto set = SolveAll(env.spec(), truth, c);
  DemoConfig dc;
  dc.levels = {1, 2};
  CHECK_THROWS_AS(GenerateDemosFromPolicies(env, truth, set, dc), ConfigError);
  dc.levels = {};
  dc.min_length = 50;
  CHECK_THROWS_AS(GenerateDemosFromPolicies(env, truth, set, dc), ConfigError);
  // GenerateDemos raises the solved depth to cover requested levels.
  dc = DemoConfig{};
  dc.count = 2;
  dc.assignment = LevelAssignment::kFixed;
  dc.fixed_levels = {3, 3};
  CHECK(GenerateDemos(env, truth, c, dc).size() == 2);
}

TEST_CASE("random level assignment is uniform") {
  RingEnv env;
  RewardModel truth(env.spec(), kRingWeights);
  SolverConfig c;
  c.compute_gradients = false;
  auto set = SolveAll(env.spec(), truth, c);
  DemoConfig dc;
  dc.count = 10000;
  dc.max_steps = 1;
  dc.seed = 77;
  const Dataset demos = GenerateDemosFromPolicies(env, truth, set, dc);
  int counts[2][2] = {{0, 0}, {0, 0}};
  for (const auto& d : demos) {
    for (int i = 0; i < 2; ++i) ++counts[i][(*d.gt_levels)[i] - 1];
  }
  for (int i = 0; i < 2; ++i) {
    const double e = 5000.0;
    const double chi2 = (counts[i][0] - e) * (counts[i][0] - e) / e +
                        (counts[i][1] - e) * (counts[i][1] - e) / e;
    CHECK(chi2 < 10.83);  // one degree of freedom, p = 0.001
  }
}

TEST_CASE("sampled actions follow the generating policy") {
  RingEnv env;
  const GameSpec& g = env.spec();
  RewardModel truth(g, kRingWeights);
  SolverConfig c;
  c.compute_gradients = false;
  auto set = SolveAll(g, truth, c);
  std::vector<StochasticPolicy> pols{
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(0, 2).policy),
      StochasticPolicy::Stationary(g.num_states, 3, set.Get(1, 1).policy)};
  const int s0 = 8;
  std::vector<int> counts(3, 0);
  const int N = 10000;
  for (int r = 0; r < N; ++r) {
    ++counts[Rollout(g, pols, s0, 1, 1000 + r).joint_actions[0][0]];
  }
  double chi2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double e = N * set.Get(0, 2).Policy(s0, a);
    chi2 += (counts[a] - e) * (counts[a] - e) / e;
  }
  CHECK(chi2 < 13.82);  // two degrees of freedom, p = 0.001
}

TEST_CASE("split") {
  Dataset d(10);
  for (int i = 0; i < 10; ++i) d[i].states = {i};
  auto [train, test] = Split(d, 6, 3, 5);
  CHECK(train.size() == 6);
  CHECK(test.size() == 3);
  std::set<int> seen;
  for (const auto& t : train) seen.insert(t.states[0]);
  for (const auto& t : test) seen.insert(t.states[0]);
  CHECK(seen.size() == 9);
  auto again = Split(d, 6, 3, 5);
  for (int i = 0; i < 6; ++i) CHECK(again.first[i].states == train[i].states);
  CHECK_THROWS_AS(Split(d, 8, 3, 5), InputError);
  std::vector<std::string> warnings;
  Split(d, 0, 3, 5, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("demo configuration checks") {
  RingEnv env;
  RewardModel truth(env.spec(), kRingWeights);
  SolverConfig c;
  c.compute_gradients = false;
  DemoConfig dc;
  dc.max_steps = 0;
  CHECK_THROWS_AS(GenerateDemos(env, truth, c, dc), ConfigError);
  dc = DemoConfig{};
  dc.assignment = LevelAssignment::kFixed;
  dc.fixed_levels = {1};
  CHECK_THROWS_AS(GenerateDemos(env, truth, c, dc), ConfigError);
}

}  // namespace
}  // namespace qlk_irl
