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

#ifndef QLK_IRL_DEMO_DATA_H_
#define QLK_IRL_DEMO_DATA_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qlk_irl/envs/environment.h"
#include "qlk_irl/game.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

enum class LevelAssignment { kFixed, kRandom };

struct DemoConfig {
  int count = 30;
  int max_steps = 40;
  LevelAssignment assignment = LevelAssignment::kRandom;
  // Per-agent levels for kFixed.
  std::vector<int> fixed_levels;
  // Candidate levels for kRandom; empty means {1..k_max}.
  std::vector<int> levels;
  // Rollouts shorter than this are redrawn from a fresh initial state (the
  // demo's levels are kept). 1 accepts every rollout.
  int min_length = 1;
  int max_attempts = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Solves the game under `true_model` and rolls out one demonstration per
// count, each with its own derived random stream. Trajectories carry the
// generating levels and weights as metadata.
Dataset GenerateDemos(const Environment& env, const RewardModel& true_model,
                      const SolverConfig& solver, const DemoConfig& config);

// Same, reusing already solved policies.
Dataset GenerateDemosFromPolicies(const Environment& env,
                                  const RewardModel& true_model,
                                  const LevelPolicySet& policies,
                                  const DemoConfig& config);

// Seeded disjoint split into (train, test). Appends a warning when the
// training set is empty.
std::pair<Dataset, Dataset> Split(const Dataset& dataset, int train_count,
                                  int test_count, std::uint64_t seed,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace qlk_irl

#endif  // QLK_IRL_DEMO_DATA_H_
