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

#ifndef QLK_IRL_LEVEL_INFERENCE_H_
#define QLK_IRL_LEVEL_INFERENCE_H_

#include <span>
#include <vector>

#include "qlk_irl/game.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

// Levels {1..k_max}, optionally with 0 prepended.
std::vector<int> MakeLevelSet(int k_max, bool include_level_zero = false);

// Per-agent posterior over a level set after observing t steps, together with
// its derivative with respect to the weight vector.
struct LevelPosterior {
  int t = 0;
  int num_params = 0;
  std::vector<int> levels;
  std::vector<std::vector<double>> probs;  // [agent][level index]
  std::vector<std::vector<double>> grad;   // [agent][level index * M + m]

  int num_agents() const { return static_cast<int>(probs.size()); }
  int num_levels() const { return static_cast<int>(levels.size()); }
  bool has_gradients() const { return num_params > 0 && !grad.empty(); }
  std::span<const double> Grad(int agent, int level_index) const;
  // Level with the highest probability; ties go to the lower level.
  int MapLevel(int agent) const;
};

// Uniform prior, zero gradient. `num_params` = 0 disables gradient tracking.
LevelPosterior InitPosterior(int num_agents, std::span<const int> levels,
                             int num_params);

// One Bayes step on (state, joint action), independently per agent.
// Throws InputError when every likelihood of an agent is zero.
void UpdatePosterior(LevelPosterior& posterior, const LevelPolicySet& policies,
                     int state, std::span<const int> actions);

// Horizons above this use the log-space recursion.
inline constexpr int kLogSpaceHorizon = 500;

// Folds UpdatePosterior over every step of the trajectory. When `history` is
// given it receives the prior followed by the posterior after each step.
LevelPosterior InferTrajectory(const Trajectory& trajectory,
                               const LevelPolicySet& policies,
                               std::span<const int> levels, bool gradients,
                               std::vector<LevelPosterior>* history = nullptr);

// Same result computed from accumulated log-likelihoods:
// P(k) = softmax(log prior + sum_t log pi^k), dP = P (dl - sum P dl).
LevelPosterior InferTrajectoryLogSpace(
    const Trajectory& trajectory, const LevelPolicySet& policies,
    std::span<const int> levels, bool gradients,
    std::vector<LevelPosterior>* history = nullptr);

}  // namespace qlk_irl

#endif  // QLK_IRL_LEVEL_INFERENCE_H_
