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

#ifndef QLK_IRL_LEADER_FOLLOWER_H_
#define QLK_IRL_LEADER_FOLLOWER_H_

#include <span>
#include <vector>

#include "qlk_irl/game.h"
#include "qlk_irl/learner.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

// Time-indexed quantal policy of one agent in the single-agent MDP obtained
// by fixing every opponent's action at each step. Backward induction from a
// zero terminal value, with the power-mean backup and softmax of the solver.
struct ConditionedPolicy {
  int agent = 0;
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> policy;  // [(t * S + s) * A + a]

  std::span<const double> Row(int t, int s) const;
  StochasticPolicy AsStochasticPolicy() const;
};

// Opponent actions the agent is conditioned on at each step of the
// trajectory. With leader < 0 (or agent != leader) these are the recorded
// actions; the leader instead sees every other agent hold its stationary
// action. The agent's own entries are left as recorded and ignored.
std::vector<std::vector<int>> ConditioningActions(const GameSpec& spec,
                                                  const Trajectory& trajectory,
                                                  int agent, int leader);

ConditionedPolicy SolveConditioned(
    const GameSpec& spec, const RewardModel& model, double kappa,
    double lambda, int agent,
    const std::vector<std::vector<int>>& opponent_actions);

struct ConditionedLogLik {
  double loglik = 0.0;
  std::vector<double> gradient;  // full weight vector; nonzero in own block
};

// sum_t log pi_t(s_t, a^i_t) for one agent under its conditioned policy.
ConditionedLogLik ConditionedTrajectoryLogLik(const GameSpec& spec,
                                              const RewardModel& model,
                                              double kappa, double lambda,
                                              int agent,
                                              const Trajectory& trajectory,
                                              int leader, bool with_gradient);

// Sum over agents and demonstrations, minus l2 |w|^2. The agents' terms
// share no parameters.
ObjectiveValue LfObjectiveAndGradient(const Dataset& demos,
                                      const GameSpec& spec,
                                      std::span<const double> weights,
                                      const SolverConfig& solver,
                                      const LearnerConfig& learner,
                                      bool with_gradient = true);

LearnResult LearnLf(const Dataset& demos, const GameSpec& spec,
                    const LearnerConfig& learner, const SolverConfig& solver);

}  // namespace qlk_irl

#endif  // QLK_IRL_LEADER_FOLLOWER_H_
