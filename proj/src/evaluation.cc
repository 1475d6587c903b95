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

#include "qlk_irl/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "qlk_irl/envs/driving.h"
#include "qlk_irl/error.h"
#include "qlk_irl/leader_follower.h"
#include "qlk_irl/level_inference.h"

namespace qlk_irl {

double Pcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("correlation length mismatch");
  if (x.size() < 2) throw InputError("correlation needs at least 2 entries");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw InputError("correlation undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> x) {
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Scc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("correlation length mismatch");
  return Pcc(AverageRanks(x), AverageRanks(y));
}

std::string RegenModeName(RegenMode mode) {
  return mode == RegenMode::kMap ? "map" : "prior-marginal";
}

RegenMode ParseRegenMode(const std::string& name) {
  if (name == "map") return RegenMode::kMap;
  if (name == "prior-marginal") return RegenMode::kPriorMarginal;
  throw ConfigError("unknown regeneration mode '" + name +
                    "' (expected map or prior-marginal)");
}

std::vector<std::vector<double>> LevelFrequencies(
    const Dataset& demos, const LevelPolicySet& policies,
    std::span<const int> levels) {
  const int n = policies.num_agents();
  std::vector<std::vector<double>> freq(
      n, std::vector<double>(levels.size(), 0.0));
  if (demos.empty()) {
    for (auto& row : freq) {
      std::fill(row.begin(), row.end(), 1.0 / levels.size());
    }
    return freq;
  }
  for (const auto& demo : demos) {
    const auto post = InferTrajectory(demo, policies, levels, false);
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < levels.size(); ++k) {
        freq[i][k] += post.probs[i][k] / static_cast<double>(demos.size());
      }
    }
  }
  return freq;
}

namespace {

void CheckStart(const Environment& env, const Trajectory& test) {
  if (test.size() == 0) throw InputError("test trajectory is empty");
  if (test.states[0] < 0 || test.states[0] >= env.spec().num_states) {
    throw InputError("test trajectory starts outside the state space");
  }
}

Regenerated RollOutLevels(const Environment& env, const Trajectory& test,
                          const LevelPolicySet& policies,
                          std::vector<int> levels, std::uint64_t seed) {
  const GameSpec& spec = env.spec();
  std::vector<StochasticPolicy> pols;
  for (int i = 0; i < spec.num_agents; ++i) {
    pols.push_back(StochasticPolicy::Stationary(
        spec.num_states, spec.action_counts[i],
        policies.Get(i, levels[i]).policy));
  }
  Regenerated out;
  out.trajectory = Rollout(spec, pols, test.states[0], test.size(), seed);
  out.trajectory.env_id = env.id();
  out.trajectory.dt = env.dt();
  out.trajectory.gt_levels = levels;
  out.levels = std::move(levels);
  return out;
}

}  // namespace

Regenerated RegenerateQlk(const Environment& env, const Trajectory& test,
                          const LevelPolicySet& policies,
                          std::span<const int> levels, RegenMode mode,
                          const std::vector<std::vector<double>>& level_prior,
                          std::uint64_t seed) {
  CheckStart(env, test);
  const int n = env.spec().num_agents;
  std::vector<int> chosen(n);
  std::mt19937_64 rng(seed);
  if (mode == RegenMode::kMap) {
    const auto post = InferTrajectory(test, policies, levels, false);
    for (int i = 0; i < n; ++i) chosen[i] = post.MapLevel(i);
  } else {
    if (static_cast<int>(level_prior.size()) != n) {
      throw InputError("level prior needs one row per agent");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      if (level_prior[i].size() != levels.size()) {
        throw InputError("level prior row does not match the level set");
      }
      chosen[i] = levels[SampleIndex(level_prior[i], u(rng))];
    }
  }
  return RollOutLevels(env, test, policies, std::move(chosen), rng());
}

Regenerated RegeneratePr2(const Environment& env, const Trajectory& test,
                          const LevelPolicySet& policies, std::uint64_t seed) {
  CheckStart(env, test);
  std::mt19937_64 rng(seed);
  return RollOutLevels(env, test, policies,
                       std::vector<int>(env.spec().num_agents, 1), rng());
}

Regenerated RegenerateLf(const Environment& env, const Trajectory& test,
                         const RewardModel& model, const SolverConfig& solver,
                         int leader, std::uint64_t seed) {
  CheckStart(env, test);
  CheckTrajectory(env.spec(), test);
  const GameSpec& spec = env.spec();
  std::vector<ConditionedPolicy> conditioned;
  for (int i = 0; i < spec.num_agents; ++i) {
    conditioned.push_back(SolveConditioned(
        spec, model, solver.kappa, solver.Lambda(i), i,
        ConditioningActions(spec, test, i, leader)));
  }
  std::vector<StochasticPolicy> pols;
  for (const auto& c : conditioned) pols.push_back(c.AsStochasticPolicy());
  std::mt19937_64 rng(seed);
  Regenerated out;
  out.trajectory = Rollout(spec, pols, test.states[0], test.size(), rng());
  out.trajectory.env_id = env.id();
  out.trajectory.dt = env.dt();
  return out;
}

TrajectoryDistance TrajectoryScore(const Environment& env,
                                   const Trajectory& generated,
                                   const Trajectory& test) {
  TrajectoryDistance out;
  out.length_mismatch = generated.size() != test.size();
  const int T = std::min(generated.size(), test.size());
  if (T == 0) return out;
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    const auto a = env.PhysicalState(generated.states[t]);
    const auto b = env.PhysicalState(test.states[t]);
    double sq = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      sq += (a[d] - b[d]) * (a[d] - b[d]);
    }
    total += std::sqrt(sq);
  }
  out.score = total / T;
  return out;
}

double MeanTrajectoryScore(const Environment& env, const Dataset& generated,
                           const Dataset& test) {
  if (generated.size() != test.size()) {
    throw InputError("generated and test sets differ in size");
  }
  if (test.empty()) throw InputError("no trajectories to score");
  double total = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    total += TrajectoryScore(env, generated[i], test[i]).score;
  }
  return total / static_cast<double>(test.size());
}

double DecisionScore(const Environment& env, const Dataset& generated,
                     const Dataset& test) {
  const auto* driving = dynamic_cast<const DrivingEnv*>(&env);
  if (driving == nullptr) {
    throw UnsupportedMetricError("decision score is defined for driving only, "
                                 "not '" + env.id() + "'");
  }
  if (generated.size() != test.size()) {
    throw InputError("generated and test sets differ in size");
  }
  if (test.empty()) throw InputError("no trajectories to score");
  int match = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (UpperCarYields(*driving, generated[i]) ==
        UpperCarYields(*driving, test[i])) {
      ++match;
    }
  }
  return static_cast<double>(match) / static_cast<double>(test.size());
}

std::string LearnRecordCsv(const std::vector<EpochRecord>& records) {
  if (records.empty()) throw InputError("no learning records");
  std::ostringstream out;
  out.precision(17);
  out << "epoch,loglik,gradnorm";
  for (std::size_t m = 0; m < records[0].weights.size(); ++m) {
    out << ",w_" << m;
  }
  out << ",seconds\n";
  for (const auto& r : records) {
    out << r.epoch << "," << r.loglik << "," << r.grad_norm;
    for (double w : r.weights) out << "," << w;
    out << "," << r.seconds << "\n";
  }
  return out.str();
}

double GroundTruthLogLik(const Dataset& demos, const LevelPolicySet& policies) {
  double total = 0.0;
  for (std::size_t d = 0; d < demos.size(); ++d) {
    if (!demos[d].gt_levels) {
      throw InputError("demonstration " + std::to_string(d) +
                       " has no ground-truth level metadata");
    }
    total += DemoLogLikGivenLevels(demos[d], *demos[d].gt_levels, policies);
  }
  return total;
}

}  // namespace qlk_irl
