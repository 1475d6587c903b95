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

#ifndef QLK_IRL_CONFIG_H_
#define QLK_IRL_CONFIG_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qlk_irl/demo_data.h"
#include "qlk_irl/envs/environment.h"
#include "qlk_irl/evaluation.h"
#include "qlk_irl/learner.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

// Everything a CLI run reads from its YAML config file:
//
//   env: {kind: pacman, ...}            # see env_config.h
//   solver:  {k_max: 2, lambda: 1.0, kappa: 8, vi_tol: 1e-6, vi_max_iters: 0}
//   learner: {algorithm: cognition-aware, eta: 1e-3, l2: 0.01,
//             max_epochs: 200, grad_tol: 1e-4, leader: -1,
//             include_level_zero: false, init_low: 0.1, init_high: 1.0}
//   demos:   {count: 30, max_steps: 40, levels: random, min_length: 1,
//             train: 30, test: 15}
//   regen:   {mode: map}
//   true_weights: [[...], [...]]        # one block per agent
//
// Every section is optional; command-line flags override individual keys.
struct ExperimentConfig {
  std::string text;  // verbatim file contents, hashed into the manifest
  std::shared_ptr<Environment> env;
  SolverConfig solver;
  LearnerConfig learner;
  DemoConfig demos;
  int train_count = -1;  // -1: all but test_count
  int test_count = 0;
  RegenMode regen_mode = RegenMode::kMap;
  std::optional<std::vector<std::vector<double>>> true_weights;
};

// Throws ConfigError on malformed YAML, unknown sections or bad values.
ExperimentConfig ParseExperimentConfig(const std::string& text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

}  // namespace qlk_irl

#endif  // QLK_IRL_CONFIG_H_
