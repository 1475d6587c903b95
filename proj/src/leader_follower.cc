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

#include "qlk_irl/leader_follower.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlk_irl/error.h"
#include "qlk_irl/parallel.h"

namespace qlk_irl {

std::span<const double> ConditionedPolicy::Row(int t, int s) const {
  const std::size_t at =
      (static_cast<std::size_t>(t) * num_states + s) * num_actions;
  return {policy.data() + at, static_cast<std::size_t>(num_actions)};
}

StochasticPolicy ConditionedPolicy::AsStochasticPolicy() const {
  std::vector<std::span<const double>> stages;
  const std::size_t stage = static_cast<std::size_t>(num_states) * num_actions;
  for (int t = 0; t < horizon; ++t) {
    stages.emplace_back(policy.data() + t * stage, stage);
  }
  return StochasticPolicy(num_states, num_actions, std::move(stages));
}

std::vector<std::vector<int>> ConditioningActions(const GameSpec& spec,
                                                  const Trajectory& trajectory,
                                                  int agent, int leader) {
  std::vector<std::vector<int>> out = trajectory.joint_actions;
  if (leader >= 0 && agent == leader) {
    for (auto& joint : out) {
      for (int j = 0; j < spec.num_agents; ++j) {
        if (j != agent) joint[j] = spec.stationary_actions[j];
      }
    }
  }
  return out;
}

namespace {

// Backward induction shared by policy construction and the likelihood.
// `on_step(t, q, s)` sees the Q row of every state at step t; `dq` is filled
// with the own-block gradient when gradients are requested.
// `active[t]`, when given, lists the only states whose values are needed at
// step t; it must contain every successor of active[t - 1].
template <typename OnRow>
void BackwardInduction(const GameSpec& spec, const RewardModel& model,
                       double kappa, int agent,
                       const std::vector<std::vector<int>>& opponent_actions,
                       bool with_gradient,
                       const std::vector<std::vector<int>>* active,
                       OnRow&& on_row) {
  const int S = spec.num_states;
  const int A = spec.action_counts[agent];
  const int F = spec.feature_dims[agent];
  const double gamma = spec.discount;
  const auto rewards = RewardTable(model, spec, agent);
  std::vector<double> v(S, 0.0), v_prev(S);
  std::vector<double> dv(with_gradient ? static_cast<std::size_t>(S) * F : 0,
                         0.0);
  std::vector<double> dv_prev(dv.size());
  std::vector<double> q(A), dq(with_gradient ? A * F : 0), c(A);
  std::vector<int> joint_index(A);
  const int T = static_cast<int>(opponent_actions.size());
  for (int t = T - 1; t >= 0; --t) {
    std::vector<int> joint = opponent_actions[t];
    for (int a = 0; a < A; ++a) {
      joint[agent] = a;
      joint_index[a] = spec.JointIndex(joint);
    }
    v_prev.swap(v);
    dv_prev.swap(dv);
    const int count = active ? static_cast<int>((*active)[t].size()) : S;
    for (int idx = 0; idx < count; ++idx) {
      const int s = active ? (*active)[t][idx] : idx;
      for (int a = 0; a < A; ++a) {
        const int next = spec.NextJoint(s, joint_index[a]);
        q[a] = rewards[next] + gamma * v_prev[next];
        if (with_gradient) {
          auto phi = spec.Features(agent, next);
          const double* d = dv_prev.data() + static_cast<std::size_t>(next) * F;
          for (int f = 0; f < F; ++f) dq[a * F + f] = phi[f] + gamma * d[f];
        }
      }
      if (spec.IsTerminal(s)) {
        std::fill(q.begin(), q.end(), 0.0);
        std::fill(dq.begin(), dq.end(), 0.0);
      }
      v[s] = SmoothMax(q, kappa);
      if (with_gradient) {
        SmoothMaxGradient(q, kappa, c);
        double* d = dv.data() + static_cast<std::size_t>(s) * F;
        std::fill_n(d, F, 0.0);
        for (int a = 0; a < A; ++a) {
          for (int f = 0; f < F; ++f) d[f] += c[a] * dq[a * F + f];
        }
      }
      on_row(t, s, std::span<const double>(q), std::span<const double>(dq));
    }
  }
}

// States reachable at each step from the recorded states when the opponents
// play the conditioning actions and the agent plays anything.
std::vector<std::vector<int>> ReachableStates(
    const GameSpec& spec, int agent, const std::vector<int>& recorded,
    const std::vector<std::vector<int>>& opponent_actions) {
  const int T = static_cast<int>(opponent_actions.size());
  const int A = spec.action_counts[agent];
  std::vector<std::vector<int>> out(T);
  std::vector<int> stamp(spec.num_states, -1);
  if (T == 0) return out;
  out[0] = {recorded[0]};
  for (int t = 0; t + 1 < T; ++t) {
    stamp[recorded[t + 1]] = t + 1;
    out[t + 1].push_back(recorded[t + 1]);
    std::vector<int> joint = opponent_actions[t];
    for (int s : out[t]) {
      for (int a = 0; a < A; ++a) {
        joint[agent] = a;
        const int next = spec.NextJoint(s, spec.JointIndex(joint));
        if (stamp[next] != t + 1) {
          stamp[next] = t + 1;
          out[t + 1].push_back(next);
        }
      }
    }
    std::sort(out[t + 1].begin(), out[t + 1].end());
  }
  return out;
}

void CheckConditioning(const GameSpec& spec, int agent,
                       const std::vector<std::vector<int>>& actions) {
  if (agent < 0 || agent >= spec.num_agents) {
    throw InputError("agent index out of range: " + std::to_string(agent));
  }
  for (const auto& joint : actions) {
    if (static_cast<int>(joint.size()) != spec.num_agents) {
      throw InputError("joint action has the wrong number of agents");
    }
  }
}

}  // namespace

ConditionedPolicy SolveConditioned(
    const GameSpec& spec, const RewardModel& model, double kappa,
    double lambda, int agent,
    const std::vector<std::vector<int>>& opponent_actions) {
  CheckConditioning(spec, agent, opponent_actions);
  ConditionedPolicy out;
  out.agent = agent;
  out.horizon = static_cast<int>(opponent_actions.size());
  out.num_states = spec.num_states;
  out.num_actions = spec.action_counts[agent];
  out.policy.assign(static_cast<std::size_t>(out.horizon) * out.num_states *
                        out.num_actions,
                    0.0);
  BackwardInduction(
      spec, model, kappa, agent, opponent_actions, false, nullptr,
      [&](int t, int s, std::span<const double> q, std::span<const double>) {
        const std::size_t at =
            (static_cast<std::size_t>(t) * out.num_states + s) *
            out.num_actions;
        QuantalResponse(q, lambda,
                        {out.policy.data() + at,
                         static_cast<std::size_t>(out.num_actions)});
      });
  return out;
}

ConditionedLogLik ConditionedTrajectoryLogLik(const GameSpec& spec,
                                              const RewardModel& model,
                                              double kappa, double lambda,
                                              int agent,
                                              const Trajectory& trajectory,
                                              int leader, bool with_gradient) {
  const auto actions = ConditioningActions(spec, trajectory, agent, leader);
  CheckConditioning(spec, agent, actions);
  const int A = spec.action_counts[agent];
  const int F = spec.feature_dims[agent];
  const int offset = spec.ParamOffset(agent);
  ConditionedLogLik out;
  out.gradient.assign(spec.NumParams(), 0.0);
  std::vector<double> pi(A);
  if (trajectory.size() == 0) return out;
  const auto active =
      ReachableStates(spec, agent, trajectory.states, actions);
  BackwardInduction(
      spec, model, kappa, agent, actions, with_gradient, &active,
      [&](int t, int s, std::span<const double> q,
          std::span<const double> dq) {
        if (s != trajectory.states[t]) return;
        QuantalResponse(q, lambda, pi);
        const int a = trajectory.joint_actions[t][agent];
        out.loglik += std::log(pi[a]);
        if (!with_gradient) return;
        // d log pi_a = lambda (dq_a - sum_b pi_b dq_b)
        for (int f = 0; f < F; ++f) {
          double mean = 0.0;
          for (int b = 0; b < A; ++b) mean += pi[b] * dq[b * F + f];
          out.gradient[offset + f] += lambda * (dq[a * F + f] - mean);
        }
      });
  return out;
}

ObjectiveValue LfObjectiveAndGradient(const Dataset& demos,
                                      const GameSpec& spec,
                                      std::span<const double> weights,
                                      const SolverConfig& solver,
                                      const LearnerConfig& learner,
                                      bool with_gradient) {
  const RewardModel model(spec, {weights.begin(), weights.end()});
  const int n = spec.num_agents;
  const int M = spec.NumParams();
  const int tasks = static_cast<int>(demos.size()) * n;
  std::vector<ConditionedLogLik> terms(tasks);
  ParallelFor(tasks, learner.workers, [&](int task) {
    const int d = task / n;
    const int i = task % n;
    terms[task] = ConditionedTrajectoryLogLik(spec, model, solver.kappa,
                                              solver.Lambda(i), i, demos[d],
                                              learner.leader, with_gradient);
  });
  ObjectiveValue out;
  if (with_gradient) out.gradient.assign(M, 0.0);
  for (const auto& term : terms) {
    out.loglik += term.loglik;
    if (!with_gradient) continue;
    for (int m = 0; m < M; ++m) out.gradient[m] += term.gradient[m];
  }
  double sq = 0.0;
  for (int m = 0; m < M; ++m) {
    sq += weights[m] * weights[m];
    if (with_gradient) out.gradient[m] -= 2.0 * learner.l2 * weights[m];
  }
  out.objective = out.loglik - learner.l2 * sq;
  return out;
}

LearnResult LearnLf(const Dataset& demos, const GameSpec& spec,
                    const LearnerConfig& learner, const SolverConfig& solver) {
  if (demos.empty()) throw InputError("no demonstrations to learn from");
  if (learner.leader >= spec.num_agents) {
    throw ConfigError("leader index out of range: " +
                      std::to_string(learner.leader));
  }
  for (const auto& d : demos) CheckTrajectory(spec, d);
  solver.Validate(spec);
  LearnerConfig config = learner;
  config.algorithm = Algorithm::kLeaderFollower;
  return Ascend(spec, config, [&](std::span<const double> w) {
    return LfObjectiveAndGradient(demos, spec, w, solver, config, true);
  });
}

}  // namespace qlk_irl
