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

#ifndef QLK_IRL_GAME_H_
#define QLK_IRL_GAME_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlk_irl {

// A finite, reward-free stochastic game with deterministic joint dynamics.
//
// States are dense indices in [0, num_states). Joint actions are enumerated
// lexicographically by agent index (agent 0 is the most significant digit),
// and `successor` is the tabulated dynamics f(s, a^1..a^n).
//
// Features are per agent: `features[i]` holds num_states rows of length
// feature_dims[i]. Agent i's reward is the dot product of its weight block
// with its feature row, so reward parameters live in one concatenated vector
// of dimension NumParams() with per-agent block offsets.
//
// Invariants (checked by Validate()):
//   - every successor entry is a valid state index;
//   - terminal states are absorbing and carry all-zero features;
//   - every feature entry is >= 0.
struct GameSpec {
  int num_agents = 0;
  int num_states = 0;
  std::vector<int> action_counts;
  std::vector<int> feature_dims;
  // Action each agent takes when treated as a stationary object by a
  // level-0 opponent ("stay" / "maintain").
  std::vector<int> stationary_actions;
  double discount = 0.95;
  std::vector<std::int32_t> successor;  // [s * NumJointActions() + joint]
  std::vector<std::uint8_t> terminal;   // [s]
  std::vector<std::vector<double>> features;  // [agent][s * m_i + f]

  int NumJointActions() const;
  int NumParams() const;
  int ParamOffset(int agent) const;

  int JointIndex(std::span<const int> actions) const;
  std::vector<int> DecodeJoint(int joint) const;

  int Next(int state, std::span<const int> actions) const;
  int NextJoint(int state, int joint) const {
    return successor[static_cast<std::size_t>(state) * NumJointActions() +
                     joint];
  }
  bool IsTerminal(int state) const { return terminal[state] != 0; }
  std::span<const double> Features(int agent, int state) const;

  // Throws ConfigError when an invariant does not hold.
  void Validate() const;
};

// Concatenated nonnegative feature weights (w_1, ..., w_n).
class RewardModel {
 public:
  RewardModel() = default;
  RewardModel(const GameSpec& spec, std::vector<double> weights);
  static RewardModel FromBlocks(const GameSpec& spec,
                                const std::vector<std::vector<double>>& blocks);

  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> Block(int agent) const;
  std::vector<std::vector<double>> Blocks() const;
  int num_agents() const { return static_cast<int>(offsets_.size()) - 1; }

 private:
  std::vector<double> weights_;
  std::vector<int> offsets_;  // size num_agents + 1
};

struct JointAction {
  std::vector<int> actions;
};

// One demonstration: (s_0, a_0), ..., (s_T, a_T).
struct Trajectory {
  std::string env_id;
  double dt = 0.0;
  std::vector<int> states;
  std::vector<std::vector<int>> joint_actions;
  // Imported real data is exempt from the dynamics-consistency check.
  bool imported = false;
  std::optional<std::vector<int>> gt_levels;
  std::optional<std::vector<std::vector<double>>> gt_weights;

  int size() const { return static_cast<int>(states.size()); }
};

using Dataset = std::vector<Trajectory>;

// w_i . phi_i(s).
double Reward(const RewardModel& model, const GameSpec& spec, int agent,
              int state);

// d reward_i(s) / d w in the full concatenated coordinate frame: phi_i(s) in
// agent i's block, zeros elsewhere.
std::vector<double> RewardGradient(const GameSpec& spec, int agent, int state);

// Per-state reward table for one agent.
std::vector<double> RewardTable(const RewardModel& model, const GameSpec& spec,
                                int agent);

// Row-stochastic policy over one agent's actions. A policy holds one or more
// stages of num_states x num_actions tables; stage t is used at step t and
// the last stage repeats. A stationary policy has exactly one stage.
class StochasticPolicy {
 public:
  StochasticPolicy(int num_states, int num_actions,
                   std::vector<std::span<const double>> stages);
  static StochasticPolicy Stationary(int num_states, int num_actions,
                                     std::span<const double> table);

  std::span<const double> Row(int step, int state) const;
  int num_actions() const { return num_actions_; }
  int num_states() const { return num_states_; }
  // Throws InputError if any row deviates from a distribution by > tol.
  void CheckNormalized(double tol = 1e-9) const;

 private:
  int num_states_;
  int num_actions_;
  std::vector<std::span<const double>> stages_;
};

// Samples each agent's action independently at every step until a terminal
// state is recorded or max_steps states have been recorded.
Trajectory Rollout(const GameSpec& spec,
                   std::span<const StochasticPolicy> policies, int s0,
                   int max_steps, std::uint64_t rng_seed);

// Index sampled from a discrete distribution given a uniform draw in [0, 1).
int SampleIndex(std::span<const double> probs, double u);

// Throws InputError describing the first transition that disagrees with the
// dynamics, or a malformed state/action entry.
void CheckTrajectory(const GameSpec& spec, const Trajectory& trajectory);

}  // namespace qlk_irl

#endif  // QLK_IRL_GAME_H_
