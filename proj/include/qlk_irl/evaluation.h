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

#ifndef QLK_IRL_EVALUATION_H_
#define QLK_IRL_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qlk_irl/envs/environment.h"
#include "qlk_irl/game.h"
#include "qlk_irl/learner.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

// Pearson correlation. Throws InputError on length mismatch, fewer than two
// entries or a constant argument.
double Pcc(std::span<const double> x, std::span<const double> y);
// Ranks starting at 1; ties share their average rank.
std::vector<double> AverageRanks(std::span<const double> x);
// Spearman: Pearson of the average ranks.
double Scc(std::span<const double> x, std::span<const double> y);

enum class RegenMode {
  // Most probable level per agent given the whole test trajectory.
  kMap,
  // Levels drawn from the average training-set posterior.
  kPriorMarginal,
};

std::string RegenModeName(RegenMode mode);
RegenMode ParseRegenMode(const std::string& name);

struct Regenerated {
  Trajectory trajectory;
  std::vector<int> levels;  // empty for leader-follower
};

// Average posterior over `levels` across a dataset: [agent][level index].
std::vector<std::vector<double>> LevelFrequencies(
    const Dataset& demos, const LevelPolicySet& policies,
    std::span<const int> levels);

// Rolls out pi^{i, k_i} from the test trajectory's initial state for at most
// its length. `level_prior` is only read in kPriorMarginal mode.
Regenerated RegenerateQlk(const Environment& env, const Trajectory& test,
                          const LevelPolicySet& policies,
                          std::span<const int> levels, RegenMode mode,
                          const std::vector<std::vector<double>>& level_prior,
                          std::uint64_t seed);

// Every agent at level 1.
Regenerated RegeneratePr2(const Environment& env, const Trajectory& test,
                          const LevelPolicySet& policies, std::uint64_t seed);

// Each agent plays its quantal response conditioned on the others' recorded
// actions in the test trajectory.
Regenerated RegenerateLf(const Environment& env, const Trajectory& test,
                         const RewardModel& model, const SolverConfig& solver,
                         int leader, std::uint64_t seed);

struct TrajectoryDistance {
  double score = 0.0;
  // Set when the trajectories differ in length; the score then covers the
  // common prefix.
  bool length_mismatch = false;
};

// Mean over time of the Euclidean distance between physical state vectors.
// Lower is better.
TrajectoryDistance TrajectoryScore(const Environment& env,
                                   const Trajectory& generated,
                                   const Trajectory& test);

// Mean TrajectoryScore over index-aligned pairs.
double MeanTrajectoryScore(const Environment& env, const Dataset& generated,
                           const Dataset& test);

// Fraction of index-aligned pairs whose yield labels agree. Driving only;
// throws UnsupportedMetricError for other environments.
double DecisionScore(const Environment& env, const Dataset& generated,
                     const Dataset& test);

// Learning-curve CSV: epoch,loglik,gradnorm,w_0..w_{M-1},seconds.
std::string LearnRecordCsv(const std::vector<EpochRecord>& records);

// Log-likelihood of the demos under `policies` at their recorded generating
// levels. Throws InputError when a demo lacks level metadata.
double GroundTruthLogLik(const Dataset& demos, const LevelPolicySet& policies);

}  // namespace qlk_irl

#endif  // QLK_IRL_EVALUATION_H_
