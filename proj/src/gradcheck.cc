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

#include "qlk_irl/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qlk_irl {

std::vector<double> RandomDirection(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> d(size);
  double norm = 0.0;
  for (double& x : d) {
    x = normal(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : d) x /= norm;
  return d;
}

double RelativeError(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  if (scale < std::numeric_limits<double>::min()) return 0.0;
  return std::sqrt(diff) / scale;
}

namespace {

void Shift(std::span<const double> w, std::span<const double> d, double step,
           std::vector<double>& plus, std::vector<double>& minus) {
  plus.assign(w.begin(), w.end());
  minus.assign(w.begin(), w.end());
  for (std::size_t m = 0; m < w.size(); ++m) {
    plus[m] += step * d[m];
    minus[m] -= step * d[m];
  }
}

}  // namespace

SolverGradError CheckSolverGradient(const GameSpec& spec,
                                    std::span<const double> weights,
                                    const SolverConfig& solver, double step,
                                    std::uint64_t direction_seed) {
  const int M = spec.NumParams();
  const auto dir = RandomDirection(M, direction_seed);
  SolverConfig with = solver;
  with.compute_gradients = true;
  SolverConfig without = solver;
  without.compute_gradients = false;
  const auto base = SolveAll(
      spec, RewardModel(spec, {weights.begin(), weights.end()}), with);
  std::vector<double> plus, minus;
  Shift(weights, dir, step, plus, minus);
  const auto hi = SolveAll(spec, RewardModel(spec, plus), without);
  const auto lo = SolveAll(spec, RewardModel(spec, minus), without);

  SolverGradError err;
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int k = 0; k <= solver.k_max; ++k) {
      const LevelTable& t = base.Get(i, k);
      const std::size_t sa = t.q.size();
      std::vector<double> aq(sa), fq(sa), ap(sa), fp(sa);
      for (std::size_t idx = 0; idx < sa; ++idx) {
        double dq = 0.0, dp = 0.0;
        for (int m = 0; m < M; ++m) {
          dq += t.q_grad[idx * M + m] * dir[m];
          dp += t.policy_grad[idx * M + m] * dir[m];
        }
        aq[idx] = dq;
        ap[idx] = dp;
        fq[idx] = (hi.Get(i, k).q[idx] - lo.Get(i, k).q[idx]) / (2 * step);
        fp[idx] =
            (hi.Get(i, k).policy[idx] - lo.Get(i, k).policy[idx]) / (2 * step);
      }
      err.q = std::max(err.q, RelativeError(aq, fq));
      err.policy = std::max(err.policy, RelativeError(ap, fp));
    }
  }
  return err;
}

double CheckObjectiveGradient(const Dataset& demos, const GameSpec& spec,
                              std::span<const double> weights,
                              const SolverConfig& solver,
                              const LearnerConfig& learner, double step,
                              std::uint64_t direction_seed) {
  const int M = spec.NumParams();
  const auto dir = RandomDirection(M, direction_seed);
  const auto base =
      ObjectiveAndGradient(demos, spec, weights, solver, learner, true);
  std::vector<double> plus, minus;
  Shift(weights, dir, step, plus, minus);
  const double hi =
      ObjectiveAndGradient(demos, spec, plus, solver, learner, false)
          .objective;
  const double lo =
      ObjectiveAndGradient(demos, spec, minus, solver, learner, false)
          .objective;
  double analytic = 0.0;
  for (int m = 0; m < M; ++m) analytic += base.gradient[m] * dir[m];
  const double numeric = (hi - lo) / (2 * step);
  const double a[1] = {analytic};
  const double b[1] = {numeric};
  return RelativeError(a, b);
}

}  // namespace qlk_irl
