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

#ifndef QLK_IRL_SOLVER_H_
#define QLK_IRL_SOLVER_H_

#include <memory>
#include <span>
#include <vector>

#include "qlk_irl/game.h"

namespace qlk_irl {

struct SolverConfig {
  // Highest level solved. Level 0 anchors the recursion.
  int k_max = 2;
  // Rationality coefficient per agent, each in (0, 1]. Empty means 1.0 for
  // every agent; a single entry applies to all agents.
  std::vector<double> lambda;
  // Exponent of the power-mean smooth max, >= 1.
  double kappa = 8.0;
  double vi_tol = 1e-6;
  // 0 selects 10 * ln(1 / vi_tol) / (1 - discount).
  int vi_max_iters = 0;
  bool compute_gradients = true;
  bool record_residuals = false;
  int workers = 1;

  double Lambda(int agent) const;
  int MaxIterations(double discount) const;
  // Throws ConfigError.
  void Validate(const GameSpec& spec) const;
};

struct SolveStats {
  int q_iterations = 0;
  int grad_iterations = 0;
  std::vector<double> q_residuals;
  std::vector<double> grad_residuals;
};

// Q-values, quantal policy and their derivatives with respect to the full
// weight vector for one (agent, level). Tables are row-major:
// q / policy are [s * A + a], q_grad / policy_grad are [(s * A + a) * M + m].
struct LevelTable {
  int num_states = 0;
  int num_actions = 0;
  int num_params = 0;
  double lambda = 1.0;
  std::vector<double> q;
  std::vector<double> policy;
  std::vector<double> q_grad;
  std::vector<double> policy_grad;
  SolveStats stats;

  bool has_gradients() const { return !q_grad.empty(); }
  std::span<const double> QRow(int s) const;
  std::span<const double> PolicyRow(int s) const;
  std::span<const double> QGrad(int s, int a) const;
  std::span<const double> PolicyGrad(int s, int a) const;
  double Policy(int s, int a) const {
    return policy[static_cast<std::size_t>(s) * num_actions + a];
  }
};

// Tables for every agent and every level 0..k_max. Tables are immutable once
// published and may be shared between sets.
class LevelPolicySet {
 public:
  LevelPolicySet() = default;
  LevelPolicySet(int num_agents, int k_max);

  const LevelTable& Get(int agent, int level) const;
  std::shared_ptr<const LevelTable> Shared(int agent, int level) const;
  void Set(int agent, int level, std::shared_ptr<const LevelTable> table);

  int num_agents() const { return num_agents_; }
  int k_max() const { return k_max_; }

 private:
  int num_agents_ = 0;
  int k_max_ = 0;
  std::vector<std::shared_ptr<const LevelTable>> tables_;
};

// (sum_a q_a^kappa)^(1/kappa) for a nonnegative row, evaluated as
// q_max * (sum_a (q_a / q_max)^kappa)^(1/kappa). A zero row maps to 0.
double PowerSum(std::span<const double> row, double kappa);

// The smooth max used in the Bellman backup: the kappa-power mean
// (mean_a q_a^kappa)^(1/kappa) = |A|^(-1/kappa) * PowerSum(row). It lies in
// [|A|^(-1/kappa) max, max], is nonexpansive in the sup norm and tends to
// the max as kappa grows.
double SmoothMax(std::span<const double> row, double kappa);
// d SmoothMax / d q_a = (q_a / SmoothMax)^(kappa - 1) / |A|; zero for a zero
// row.
void SmoothMaxGradient(std::span<const double> row, double kappa,
                       std::span<double> out);

// softmax(lambda * q).
void QuantalResponse(std::span<const double> q_row, double lambda,
                     std::span<double> out);

// Level-0: one-step lookahead on the agent's own reward with every opponent
// holding its stationary action.
LevelTable SolveLevelZero(const GameSpec& spec, const RewardModel& model,
                          const SolverConfig& config, int agent,
                          double lambda);

// Level-k (k >= 1): smoothed Bellman fixed point against opponents playing
// the given level-(k-1) tables. `opponents_prev[j]` is agent j's table; the
// entry for `agent` itself is ignored and may be null. Throws
// NonConvergenceError when vi_max_iters is exhausted.
LevelTable SolveLevelK(const GameSpec& spec, const RewardModel& model,
                       const SolverConfig& config, int agent, double lambda,
                       std::span<const LevelTable* const> opponents_prev);

// All agents, levels 0..k_max. Agent i's nested opponent models use
// lambda_i throughout; one table stack is solved per distinct lambda, so the
// default (equal lambdas) solves each (agent, level) exactly once.
LevelPolicySet SolveAll(const GameSpec& spec, const RewardModel& model,
                        const SolverConfig& config);

}  // namespace qlk_irl

#endif  // QLK_IRL_SOLVER_H_
