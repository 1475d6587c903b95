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

#ifndef QLK_IRL_GRADCHECK_H_
#define QLK_IRL_GRADCHECK_H_

#include <cstdint>
#include <span>
#include <vector>

#include "qlk_irl/game.h"
#include "qlk_irl/learner.h"
#include "qlk_irl/solver.h"

namespace qlk_irl {

// Relative error |a - b|_2 / max(|a|_2, |b|_2) between an analytic
// directional derivative and its central difference along a random unit
// direction scaled by `step`.
struct SolverGradError {
  double q = 0.0;       // worst over (agent, level)
  double policy = 0.0;  // worst over (agent, level)
};

SolverGradError CheckSolverGradient(const GameSpec& spec,
                                    std::span<const double> weights,
                                    const SolverConfig& solver, double step,
                                    std::uint64_t direction_seed);

double CheckObjectiveGradient(const Dataset& demos, const GameSpec& spec,
                              std::span<const double> weights,
                              const SolverConfig& solver,
                              const LearnerConfig& learner, double step,
                              std::uint64_t direction_seed);

// Unit vector with independent normal components.
std::vector<double> RandomDirection(int size, std::uint64_t seed);

double RelativeError(std::span<const double> a, std::span<const double> b);

}  // namespace qlk_irl

#endif  // QLK_IRL_GRADCHECK_H_
