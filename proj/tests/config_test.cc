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

#include "qlk_irl/config.h"

#include <doctest.h>

#include "qlk_irl/envs/driving.h"
#include "qlk_irl/envs/env_config.h"
#include "qlk_irl/envs/pacman.h"
#include "qlk_irl/error.h"

namespace qlk_irl {
namespace {

TEST_CASE("full experiment config") {
  const std::string text = R"(
env:
  kind: driving-mini
  d_safe: 6.0
solver:
  k_max: 3
  lambda: [0.5, 1.0]
  kappa: 4
  vi_tol: 1.0e-8
learner:
  algorithm: pr2
  eta: 0.02
  l2: 0.0
  max_epochs: 50
demos:
  count: 12
  max_steps: 25
  levels: [1, 2]
  min_length: 3
  train: 8
  test: 4
regen:
  mode: prior-marginal
true_weights:
  - [6.0, 3.6, 1.2]
  - [4.8, 2.4, 0.4]
)";
  const ExperimentConfig c = ParseExperimentConfig(text);
  CHECK(c.text == text);
  auto* driving = dynamic_cast<DrivingEnv*>(c.env.get());
  REQUIRE(driving != nullptr);
  CHECK(driving->config().d_safe == 6.0);
  CHECK(driving->config().n_x1 == 12);
  CHECK(c.solver.k_max == 3);
  CHECK(c.solver.lambda == std::vector<double>{0.5, 1.0});
  CHECK(c.solver.kappa == 4.0);
  CHECK(c.learner.algorithm == Algorithm::kPr2);
  CHECK(c.learner.eta == 0.02);
  CHECK(c.demos.assignment == LevelAssignment::kFixed);
  CHECK(c.demos.fixed_levels == std::vector<int>{1, 2});
  CHECK(c.demos.min_length == 3);
  CHECK(c.train_count == 8);
  CHECK(c.test_count == 4);
  CHECK(c.regen_mode == RegenMode::kPriorMarginal);
  REQUIRE(c.true_weights.has_value());
  CHECK((*c.true_weights)[1][2] == 0.4);
}

TEST_CASE("defaults and a scalar lambda") {
  const ExperimentConfig c =
      ParseExperimentConfig("env: {kind: pacman}\nsolver: {lambda: 0.7}\n");
  CHECK(dynamic_cast<PacmanEnv*>(c.env.get()) != nullptr);
  CHECK(c.solver.lambda == std::vector<double>{0.7});
  CHECK(c.solver.k_max == 2);
  CHECK(c.learner.algorithm == Algorithm::kCognitionAware);
  CHECK(c.demos.assignment == LevelAssignment::kRandom);
  CHECK(c.train_count == -1);
  CHECK_FALSE(c.true_weights.has_value());
}

TEST_CASE("custom maze from yaml") {
  auto env = EnvironmentFromYamlText(
      "env:\n  kind: pacman\n  maze: |\n    P#o\n    ..G\n");
  CHECK(env->spec().num_states == 50);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(ParseExperimentConfig("env: {kind: chess}"), ConfigError);
  CHECK_THROWS_AS(ParseExperimentConfig("solver: {k_max: 2}"), ConfigError);
  CHECK_THROWS_AS(ParseExperimentConfig("env: {kind: pacman}\nsolvr: {}"),
                  ConfigError);
  CHECK_THROWS_AS(
      ParseExperimentConfig("env: {kind: pacman}\nsolver: {kmax: 2}"),
      ConfigError);
  CHECK_THROWS_AS(
      ParseExperimentConfig("env: {kind: pacman}\nsolver: {lambda: 2.0}"),
      ConfigError);
  CHECK_THROWS_AS(
      ParseExperimentConfig("env: {kind: pacman}\nlearner: {eta: -1}"),
      ConfigError);
  CHECK_THROWS_AS(
      ParseExperimentConfig("env: {kind: pacman}\ndemos: {levels: [1]}"),
      ConfigError);
  CHECK_THROWS_AS(
      ParseExperimentConfig("env: {kind: pacman}\ntrue_weights: [[1, 2]]"),
      ConfigError);
  CHECK_THROWS_AS(
      ParseExperimentConfig("env: {kind: pacman}\nregen: {mode: best}"),
      ConfigError);
  CHECK_THROWS_AS(ParseExperimentConfig("env: [unclosed"), ConfigError);
  CHECK_THROWS_AS(LoadExperimentConfig("/nonexistent.yaml"), ConfigError);
}

}  // namespace
}  // namespace qlk_irl
