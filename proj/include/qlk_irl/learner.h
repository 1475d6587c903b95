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

#ifndef QLK_IRL_LEARNER_H_
#define QLK_IRL_LEARNER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlk_irl/game.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

enum class Algorithm { kCognitionAware, kPr2, kLeaderFollower };

std::string AlgorithmName(Algorithm algorithm);
// Accepts "cognition-aware", "pr2", "leader-follower" (or "lf").
Algorithm ParseAlgorithm(const std::string& name);

struct LearnerConfig {
  double eta = 1e-3;
  double l2 = 0.01;
  int max_epochs = 200;
  // Stop once the norm of the projected gradient drops below this.
  double grad_tol = 1e-4;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kCognitionAware;
  // Leader-follower only: -1 conditions every agent on the others' recorded
  // actions; otherwise this agent leads and is conditioned on the others
  // holding their stationary actions.
  int leader = -1;
  bool include_level_zero = false;
  double init_low = 0.1;
  double init_high = 1.0;
  int workers = 1;
  // Consecutive objective decreases that trigger halving eta, and the number
  // of halvings tolerated before giving up.
  int decrease_patience = 10;
  int max_halvings = 3;

  // Throws ConfigError.
  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  std::vector<double> weights;  // iterate at which the epoch was evaluated
  double loglik = 0.0;          // data term
  double objective = 0.0;       // data term minus the L2 penalty
  double grad_norm = 0.0;       // projected gradient of the objective
  double eta = 0.0;
  double seconds = 0.0;
};

struct LearnResult {
  RewardModel model;
  std::vector<EpochRecord> records;
  bool converged = false;
  int halvings = 0;
};

struct ObjectiveValue {
  double loglik = 0.0;
  double objective = 0.0;
  std::vector<double> gradient;
};

// sum_t sum_i log pi^{i, k_i}(s_t, a^i_t).
double DemoLogLikGivenLevels(const Trajectory& trajectory,
                             std::span<const int> levels,
                             const LevelPolicySet& policies);

// Expected complete-data log-likelihood over the latent level profiles,
// weighted by the level posterior of each demonstration, minus l2 |w|^2.
// `policies` must carry gradients when `with_gradient` is set.
ObjectiveValue ExpectedLogLik(const Dataset& demos,
                              const LevelPolicySet& policies,
                              std::span<const int> levels,
                              std::span<const double> weights, double l2,
                              bool with_gradient, int workers = 1);

// Solves the game at `weights` and evaluates ExpectedLogLik.
ObjectiveValue ObjectiveAndGradient(const Dataset& demos, const GameSpec& spec,
                                    std::span<const double> weights,
                                    const SolverConfig& solver,
                                    const LearnerConfig& learner,
                                    bool with_gradient = true);

// Projected gradient for the constraint w >= 0: components pushing a zero
// weight negative are dropped.
std::vector<double> ProjectedGradient(std::span<const double> weights,
                                      std::span<const double> gradient);

// Draws the seeded initial weight vector.
std::vector<double> InitialWeights(int num_params, const LearnerConfig& config);

// Gradient ascent with latent levels. Dispatches on config.algorithm, so
// kPr2 and kLeaderFollower also work here.
LearnResult Learn(const Dataset& demos, const GameSpec& spec,
                  const LearnerConfig& learner, const SolverConfig& solver);

// Every agent fixed at level 1; no latent levels.
LearnResult LearnPr2(const Dataset& demos, const GameSpec& spec,
                     const LearnerConfig& learner, const SolverConfig& solver);

// Shared ascent loop: seeded init, evaluate, record, projected step, and the
// eta-halving divergence guard. `evaluate` returns the objective and gradient
// at a weight vector. The returned model is built against `spec`.
LearnResult Ascend(
    const GameSpec& spec, const LearnerConfig& config,
    const std::function<ObjectiveValue(std::span<const double>)>& evaluate);

}  // namespace qlk_irl

#endif  // QLK_IRL_LEARNER_H_
