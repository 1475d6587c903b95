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

#include "qlk_irl/level_inference.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qlk_irl/error.h"

namespace qlk_irl {

std::vector<int> MakeLevelSet(int k_max, bool include_level_zero) {
  if (k_max < 1) throw ConfigError("k_max must be >= 1 for level inference");
  std::vector<int> levels;
  if (include_level_zero) levels.push_back(0);
  for (int k = 1; k <= k_max; ++k) levels.push_back(k);
  return levels;
}

std::span<const double> LevelPosterior::Grad(int agent,
                                             int level_index) const {
  return {grad[agent].data() +
              static_cast<std::size_t>(level_index) * num_params,
          static_cast<std::size_t>(num_params)};
}

int LevelPosterior::MapLevel(int agent) const {
  const auto& p = probs.at(agent);
  int best = 0;
  for (int k = 1; k < static_cast<int>(p.size()); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return levels[best];
}

LevelPosterior InitPosterior(int num_agents, std::span<const int> levels,
                             int num_params) {
  if (levels.empty()) throw ConfigError("empty level set");
  LevelPosterior post;
  post.levels.assign(levels.begin(), levels.end());
  post.num_params = num_params;
  const double u = 1.0 / static_cast<double>(levels.size());
  post.probs.assign(num_agents, std::vector<double>(levels.size(), u));
  if (num_params > 0) {
    post.grad.assign(num_agents,
                     std::vector<double>(levels.size() * num_params, 0.0));
  }
  return post;
}

void UpdatePosterior(LevelPosterior& post, const LevelPolicySet& policies,
                     int state, std::span<const int> actions) {
  const int K = post.num_levels();
  const int M = post.num_params;
  const bool grads = post.has_gradients();
  std::vector<double> u(K);
  std::vector<double> du(grads ? static_cast<std::size_t>(K) * M : 0);
  std::vector<double> dz(M);
  for (int i = 0; i < post.num_agents(); ++i) {
    auto& p = post.probs[i];
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
      const LevelTable& table = policies.Get(i, post.levels[k]);
      const double l = table.Policy(state, actions[i]);
      u[k] = l * p[k];
      z += u[k];
      if (grads) {
        auto dl = table.PolicyGrad(state, actions[i]);
        const double* dp = post.grad[i].data() + static_cast<std::size_t>(k) * M;
        for (int m = 0; m < M; ++m) du[k * M + m] = dl[m] * p[k] + l * dp[m];
      }
    }
    if (!(z > 0.0)) {
      throw InputError("level posterior degenerate for agent " +
                       std::to_string(i) + " at step " +
                       std::to_string(post.t));
    }
    if (grads) {
      std::fill(dz.begin(), dz.end(), 0.0);
      for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) dz[m] += du[k * M + m];
      }
      const double z2 = z * z;
      double* g = post.grad[i].data();
      for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
          g[k * M + m] = (du[k * M + m] * z - u[k] * dz[m]) / z2;
        }
      }
    }
    for (int k = 0; k < K; ++k) p[k] = u[k] / z;
  }
  ++post.t;
}

namespace {

int GradientParams(const LevelPolicySet& policies, bool gradients) {
  if (!gradients) return 0;
  const LevelTable& t = policies.Get(0, 0);
  if (!t.has_gradients()) {
    throw InputError("policy tables were solved without gradients");
  }
  return t.num_params;
}

void CheckLevels(const LevelPolicySet& policies, std::span<const int> levels) {
  for (int k : levels) {
    if (k < 0 || k > policies.k_max()) {
      throw InputError("level " + std::to_string(k) +
                       " is not covered by the solved policies");
    }
  }
}

}  // namespace

LevelPosterior InferTrajectory(const Trajectory& trajectory,
                               const LevelPolicySet& policies,
                               std::span<const int> levels, bool gradients,
                               std::vector<LevelPosterior>* history) {
  if (trajectory.size() > kLogSpaceHorizon) {
    return InferTrajectoryLogSpace(trajectory, policies, levels, gradients,
                                   history);
  }
  CheckLevels(policies, levels);
  LevelPosterior post = InitPosterior(policies.num_agents(), levels,
                                      GradientParams(policies, gradients));
  if (history) {
    history->clear();
    history->push_back(post);
  }
  for (int t = 0; t < trajectory.size(); ++t) {
    UpdatePosterior(post, policies, trajectory.states[t],
                    trajectory.joint_actions[t]);
    if (history) history->push_back(post);
  }
  return post;
}

LevelPosterior InferTrajectoryLogSpace(const Trajectory& trajectory,
                                       const LevelPolicySet& policies,
                                       std::span<const int> levels,
                                       bool gradients,
                                       std::vector<LevelPosterior>* history) {
  CheckLevels(policies, levels);
  const int n = policies.num_agents();
  const int M = GradientParams(policies, gradients);
  LevelPosterior post = InitPosterior(n, levels, M);
  const int K = post.num_levels();
  // Accumulated log-likelihood and its gradient per agent and level.
  std::vector<std::vector<double>> ll(n, std::vector<double>(K, 0.0));
  std::vector<std::vector<double>> dll(
      n, std::vector<double>(static_cast<std::size_t>(K) * M, 0.0));
  std::vector<double> mean(M);

  auto publish = [&]() {
    for (int i = 0; i < n; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) top = std::max(top, ll[i][k]);
      double z = 0.0;
      for (int k = 0; k < K; ++k) {
        post.probs[i][k] = std::exp(ll[i][k] - top);
        z += post.probs[i][k];
      }
      for (int k = 0; k < K; ++k) post.probs[i][k] /= z;
      if (M == 0) continue;
      std::fill(mean.begin(), mean.end(), 0.0);
      for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
          mean[m] += post.probs[i][k] * dll[i][k * M + m];
        }
      }
      for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
          post.grad[i][k * M + m] =
              post.probs[i][k] * (dll[i][k * M + m] - mean[m]);
        }
      }
    }
  };

  if (history) {
    history->clear();
    history->push_back(post);
  }
  for (int t = 0; t < trajectory.size(); ++t) {
    const int s = trajectory.states[t];
    const auto& acts = trajectory.joint_actions[t];
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) {
        const LevelTable& table = policies.Get(i, levels[k]);
        const double l = table.Policy(s, acts[i]);
        if (!(l > 0.0)) {
          throw InputError("zero likelihood for agent " + std::to_string(i) +
                           " at step " + std::to_string(t));
        }
        ll[i][k] += std::log(l);
        if (M > 0) {
          auto dl = table.PolicyGrad(s, acts[i]);
          for (int m = 0; m < M; ++m) dll[i][k * M + m] += dl[m] / l;
        }
      }
    }
    post.t = t + 1;
    if (history || t + 1 == trajectory.size()) {
      publish();
      if (history) history->push_back(post);
    }
  }
  return post;
}

}  // namespace qlk_irl
