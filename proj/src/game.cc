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

#include "qlk_irl/game.h"

#include <cmath>
#include <numeric>
#include <random>

#include "qlk_irl/error.h"

namespace qlk_irl {

int GameSpec::NumJointActions() const {
  int joint = 1;
  for (int count : action_counts) joint *= count;
  return joint;
}

int GameSpec::NumParams() const {
  return std::accumulate(feature_dims.begin(), feature_dims.end(), 0);
}

int GameSpec::ParamOffset(int agent) const {
  return std::accumulate(feature_dims.begin(), feature_dims.begin() + agent,
                         0);
}

int GameSpec::JointIndex(std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != num_agents) {
    throw InputError("joint action has " + std::to_string(actions.size()) +
                     " entries, expected " + std::to_string(num_agents));
  }
  int joint = 0;
  for (int i = 0; i < num_agents; ++i) {
    if (actions[i] < 0 || actions[i] >= action_counts[i]) {
      throw InputError("action " + std::to_string(actions[i]) +
                       " out of range for agent " + std::to_string(i));
    }
    joint = joint * action_counts[i] + actions[i];
  }
  return joint;
}

std::vector<int> GameSpec::DecodeJoint(int joint) const {
  std::vector<int> actions(num_agents);
  for (int i = num_agents - 1; i >= 0; --i) {
    actions[i] = joint % action_counts[i];
    joint /= action_counts[i];
  }
  return actions;
}

int GameSpec::Next(int state, std::span<const int> actions) const {
  if (state < 0 || state >= num_states) {
    throw InputError("state " + std::to_string(state) + " out of range");
  }
  return NextJoint(state, JointIndex(actions));
}

std::span<const double> GameSpec::Features(int agent, int state) const {
  const int dim = feature_dims[agent];
  return std::span<const double>(features[agent]).subspan(
      static_cast<std::size_t>(state) * dim, dim);
}

void GameSpec::Validate() const {
  if (num_agents <= 0) throw ConfigError("game needs at least one agent");
  if (num_states <= 0) throw ConfigError("game needs at least one state");
  if (static_cast<int>(action_counts.size()) != num_agents ||
      static_cast<int>(feature_dims.size()) != num_agents ||
      static_cast<int>(stationary_actions.size()) != num_agents ||
      static_cast<int>(features.size()) != num_agents) {
    throw ConfigError("per-agent tables do not match num_agents");
  }
  if (!(discount > 0.0 && discount < 1.0)) {
    throw ConfigError("discount must lie in (0, 1)");
  }
  for (int i = 0; i < num_agents; ++i) {
    if (action_counts[i] <= 0 || feature_dims[i] <= 0) {
      throw ConfigError("agent " + std::to_string(i) +
                        " needs positive action and feature counts");
    }
    if (stationary_actions[i] < 0 ||
        stationary_actions[i] >= action_counts[i]) {
      throw ConfigError("stationary action out of range");
    }
    if (features[i].size() !=
        static_cast<std::size_t>(num_states) * feature_dims[i]) {
      throw ConfigError("feature table has the wrong size");
    }
    for (double f : features[i]) {
      if (!(f >= 0.0) || !std::isfinite(f)) {
        throw ConfigError("features must be finite and nonnegative");
      }
    }
  }
  const int joint = NumJointActions();
  if (successor.size() != static_cast<std::size_t>(num_states) * joint ||
      terminal.size() != static_cast<std::size_t>(num_states)) {
    throw ConfigError("dynamics table has the wrong size");
  }
  for (int s = 0; s < num_states; ++s) {
    for (int j = 0; j < joint; ++j) {
      const int next = NextJoint(s, j);
      if (next < 0 || next >= num_states) {
        throw ConfigError("dynamics leaves the state space at state " +
                          std::to_string(s));
      }
      if (IsTerminal(s) && next != s) {
        throw ConfigError("terminal state " + std::to_string(s) +
                          " is not absorbing");
      }
    }
    if (IsTerminal(s)) {
      for (int i = 0; i < num_agents; ++i) {
        for (double f : Features(i, s)) {
          if (f != 0.0) {
            throw ConfigError("terminal state " + std::to_string(s) +
                              " has nonzero features");
          }
        }
      }
    }
  }
}

RewardModel::RewardModel(const GameSpec& spec, std::vector<double> weights)
    : weights_(std::move(weights)) {
  offsets_.assign(spec.num_agents + 1, 0);
  for (int i = 0; i < spec.num_agents; ++i) {
    offsets_[i + 1] = offsets_[i] + spec.feature_dims[i];
  }
  if (static_cast<int>(weights_.size()) != offsets_.back()) {
    throw InputError("weight vector has " + std::to_string(weights_.size()) +
                     " entries, game expects " +
                     std::to_string(offsets_.back()));
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InputError("reward weights must be finite and nonnegative");
    }
  }
}

RewardModel RewardModel::FromBlocks(
    const GameSpec& spec, const std::vector<std::vector<double>>& blocks) {
  if (static_cast<int>(blocks.size()) != spec.num_agents) {
    throw InputError("expected one weight block per agent");
  }
  std::vector<double> flat;
  for (int i = 0; i < spec.num_agents; ++i) {
    if (static_cast<int>(blocks[i].size()) != spec.feature_dims[i]) {
      throw InputError("weight block " + std::to_string(i) +
                       " has the wrong length");
    }
    flat.insert(flat.end(), blocks[i].begin(), blocks[i].end());
  }
  return RewardModel(spec, std::move(flat));
}

std::span<const double> RewardModel::Block(int agent) const {
  return std::span<const double>(weights_).subspan(
      offsets_[agent], offsets_[agent + 1] - offsets_[agent]);
}

std::vector<std::vector<double>> RewardModel::Blocks() const {
  std::vector<std::vector<double>> blocks;
  for (int i = 0; i < num_agents(); ++i) {
    auto block = Block(i);
    blocks.emplace_back(block.begin(), block.end());
  }
  return blocks;
}

namespace {

void CheckIndices(const GameSpec& spec, int agent, int state) {
  if (agent < 0 || agent >= spec.num_agents) {
    throw InputError("agent " + std::to_string(agent) + " out of range");
  }
  if (state < 0 || state >= spec.num_states) {
    throw InputError("state " + std::to_string(state) + " out of range");
  }
}

}  // namespace

double Reward(const RewardModel& model, const GameSpec& spec, int agent,
              int state) {
  CheckIndices(spec, agent, state);
  const auto w = model.Block(agent);
  const auto phi = spec.Features(agent, state);
  return std::inner_product(w.begin(), w.end(), phi.begin(), 0.0);
}

std::vector<double> RewardGradient(const GameSpec& spec, int agent,
                                   int state) {
  CheckIndices(spec, agent, state);
  std::vector<double> grad(spec.NumParams(), 0.0);
  const auto phi = spec.Features(agent, state);
  std::copy(phi.begin(), phi.end(), grad.begin() + spec.ParamOffset(agent));
  return grad;
}

std::vector<double> RewardTable(const RewardModel& model, const GameSpec& spec,
                                int agent) {
  std::vector<double> rewards(spec.num_states);
  const auto w = model.Block(agent);
  for (int s = 0; s < spec.num_states; ++s) {
    const auto phi = spec.Features(agent, s);
    rewards[s] = std::inner_product(w.begin(), w.end(), phi.begin(), 0.0);
  }
  return rewards;
}

StochasticPolicy::StochasticPolicy(int num_states, int num_actions,
                                   std::vector<std::span<const double>> stages)
    : num_states_(num_states),
      num_actions_(num_actions),
      stages_(std::move(stages)) {
  if (stages_.empty()) throw InputError("policy needs at least one stage");
  for (const auto& stage : stages_) {
    if (stage.size() != static_cast<std::size_t>(num_states) * num_actions) {
      throw InputError("policy table has the wrong size");
    }
  }
}

StochasticPolicy StochasticPolicy::Stationary(int num_states, int num_actions,
                                              std::span<const double> table) {
  return StochasticPolicy(num_states, num_actions, {table});
}

std::span<const double> StochasticPolicy::Row(int step, int state) const {
  const auto& stage =
      stages_[std::min<std::size_t>(step, stages_.size() - 1)];
  return stage.subspan(static_cast<std::size_t>(state) * num_actions_,
                       num_actions_);
}

void StochasticPolicy::CheckNormalized(double tol) const {
  for (std::size_t t = 0; t < stages_.size(); ++t) {
    for (int s = 0; s < num_states_; ++s) {
      const auto row = Row(static_cast<int>(t), s);
      double total = 0.0;
      for (double p : row) {
        if (p < 0.0 || !std::isfinite(p)) {
          throw InputError("policy has a negative or non-finite entry at "
                           "state " + std::to_string(s));
        }
        total += p;
      }
      if (std::abs(total - 1.0) > tol) {
        throw InputError("policy row at state " + std::to_string(s) +
                         " sums to " + std::to_string(total));
      }
    }
  }
}

int SampleIndex(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (probs[a] <= 0.0) continue;
    cumulative += probs[a];
    last_positive = static_cast<int>(a);
    if (u < cumulative) return static_cast<int>(a);
  }
  return last_positive;
}

Trajectory Rollout(const GameSpec& spec,
                   std::span<const StochasticPolicy> policies, int s0,
                   int max_steps, std::uint64_t rng_seed) {
  if (static_cast<int>(policies.size()) != spec.num_agents) {
    throw InputError("rollout needs one policy per agent");
  }
  if (s0 < 0 || s0 >= spec.num_states) {
    throw InputError("initial state out of range");
  }
  for (int i = 0; i < spec.num_agents; ++i) {
    if (policies[i].num_actions() != spec.action_counts[i] ||
        policies[i].num_states() != spec.num_states) {
      throw InputError("policy shape does not match agent " +
                       std::to_string(i));
    }
    policies[i].CheckNormalized();
  }
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Trajectory trajectory;
  int state = s0;
  for (int t = 0; t < max_steps; ++t) {
    std::vector<int> actions(spec.num_agents);
    for (int i = 0; i < spec.num_agents; ++i) {
      actions[i] = SampleIndex(policies[i].Row(t, state), uniform(rng));
    }
    trajectory.states.push_back(state);
    trajectory.joint_actions.push_back(actions);
    if (spec.IsTerminal(state)) break;
    state = spec.Next(state, actions);
  }
  return trajectory;
}

void CheckTrajectory(const GameSpec& spec, const Trajectory& trajectory) {
  if (trajectory.states.size() != trajectory.joint_actions.size()) {
    throw InputError("trajectory has " +
                     std::to_string(trajectory.states.size()) + " states but " +
                     std::to_string(trajectory.joint_actions.size()) +
                     " joint actions");
  }
  for (int t = 0; t < trajectory.size(); ++t) {
    const int s = trajectory.states[t];
    if (s < 0 || s >= spec.num_states) {
      throw InputError("step " + std::to_string(t) + ": state " +
                       std::to_string(s) + " out of range");
    }
    const int joint = spec.JointIndex(trajectory.joint_actions[t]);
    if (!trajectory.imported && t + 1 < trajectory.size() &&
        spec.NextJoint(s, joint) != trajectory.states[t + 1]) {
      throw InputError("step " + std::to_string(t) +
                       ": transition disagrees with the game dynamics");
    }
  }
}

}  // namespace qlk_irl
