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

#include "qlk_irl/demo_data.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "qlk_irl/error.h"
#include "qlk_irl/parallel.h"

namespace qlk_irl {

Dataset GenerateDemos(const Environment& env, const RewardModel& true_model,
                      const SolverConfig& solver, const DemoConfig& config) {
  SolverConfig sc = solver;
  sc.compute_gradients = false;
  int needed = sc.k_max;
  for (int k : config.fixed_levels) needed = std::max(needed, k);
  for (int k : config.levels) needed = std::max(needed, k);
  sc.k_max = needed;
  const LevelPolicySet policies = SolveAll(env.spec(), true_model, sc);
  return GenerateDemosFromPolicies(env, true_model, policies, config);
}

Dataset GenerateDemosFromPolicies(const Environment& env,
                                  const RewardModel& true_model,
                                  const LevelPolicySet& policies,
                                  const DemoConfig& config) {
  const GameSpec& spec = env.spec();
  const int n = spec.num_agents;
  if (config.count < 0) throw ConfigError("demo count must be >= 0");
  if (config.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (config.min_length < 1 || config.min_length > config.max_steps) {
    throw ConfigError("min_length must lie in [1, max_steps]");
  }
  std::vector<int> candidates = config.levels;
  if (candidates.empty()) {
    for (int k = 1; k <= policies.k_max(); ++k) candidates.push_back(k);
  }
  if (config.assignment == LevelAssignment::kFixed) {
    if (static_cast<int>(config.fixed_levels.size()) != n) {
      throw ConfigError("fixed level assignment needs one level per agent");
    }
    candidates = config.fixed_levels;
  }
  if (candidates.empty()) throw ConfigError("no levels to assign");
  for (int k : candidates) {
    if (k < 0 || k > policies.k_max()) {
      throw ConfigError("level " + std::to_string(k) + " was not solved");
    }
  }
  std::vector<int> starts;
  for (int s = 0; s < spec.num_states; ++s) {
    if (!spec.IsTerminal(s)) starts.push_back(s);
  }
  if (starts.empty()) {
    throw ConfigError("environment has no non-terminal initial states");
  }
  const auto blocks = true_model.Blocks();

  Dataset out(config.count);
  ParallelFor(config.count, config.workers, [&](int d) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.seed >> 32),
                      static_cast<std::uint64_t>(config.seed & 0xffffffffu),
                      static_cast<std::uint64_t>(d)};
    std::mt19937_64 rng(seq);
    std::vector<int> levels(n);
    if (config.assignment == LevelAssignment::kFixed) {
      levels = config.fixed_levels;
    } else {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(candidates.size()) - 1);
      for (int i = 0; i < n; ++i) levels[i] = candidates[pick(rng)];
    }
    std::vector<StochasticPolicy> pols;
    for (int i = 0; i < n; ++i) {
      pols.push_back(StochasticPolicy::Stationary(
          spec.num_states, spec.action_counts[i],
          policies.Get(i, levels[i]).policy));
    }
    std::uniform_int_distribution<int> pick_start(
        0, static_cast<int>(starts.size()) - 1);
    Trajectory traj;
    for (int attempt = 0;; ++attempt) {
      if (attempt == config.max_attempts) {
        throw ConfigError("no rollout of length >= " +
                          std::to_string(config.min_length) + " after " +
                          std::to_string(config.max_attempts) + " attempts");
      }
      const int s0 = starts[pick_start(rng)];
      traj = Rollout(spec, pols, s0, config.max_steps, rng());
      if (traj.size() >= config.min_length) break;
    }
    traj.env_id = env.id();
    traj.dt = env.dt();
    traj.gt_levels = levels;
    traj.gt_weights = blocks;
    out[d] = std::move(traj);
  });
  return out;
}

std::pair<Dataset, Dataset> Split(const Dataset& dataset, int train_count,
                                  int test_count, std::uint64_t seed,
                                  std::vector<std::string>* warnings) {
  if (train_count < 0 || test_count < 0) {
    throw ConfigError("split sizes must be >= 0");
  }
  if (static_cast<std::size_t>(train_count) + test_count > dataset.size()) {
    throw InputError("cannot split " + std::to_string(dataset.size()) +
                     " demonstrations into " + std::to_string(train_count) +
                     " + " + std::to_string(test_count));
  }
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::pair<Dataset, Dataset> out;
  for (int i = 0; i < train_count; ++i) out.first.push_back(dataset[order[i]]);
  for (int i = 0; i < test_count; ++i) {
    out.second.push_back(dataset[order[train_count + i]]);
  }
  if (train_count == 0 && warnings) {
    warnings->push_back("training set is empty");
  }
  return out;
}

}  // namespace qlk_irl
