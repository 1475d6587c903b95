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

#include "qlk_irl/learner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "qlk_irl/error.h"
#include "qlk_irl/leader_follower.h"
#include "qlk_irl/level_inference.h"
#include "qlk_irl/parallel.h"

namespace qlk_irl {

std::string AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCognitionAware:
      return "cognition-aware";
    case Algorithm::kPr2:
      return "pr2";
    case Algorithm::kLeaderFollower:
      return "leader-follower";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "cognition-aware" || name == "qlk") {
    return Algorithm::kCognitionAware;
  }
  if (name == "pr2") return Algorithm::kPr2;
  if (name == "leader-follower" || name == "lf") {
    return Algorithm::kLeaderFollower;
  }
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected cognition-aware, pr2 or leader-follower)");
}

void LearnerConfig::Validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ConfigError("eta must be finite and >= 0");
  }
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be >= 0");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(grad_tol >= 0.0)) throw ConfigError("grad_tol must be >= 0");
  if (!(init_low >= 0.0 && init_high >= init_low)) {
    throw ConfigError("initial weight range must satisfy 0 <= low <= high");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (decrease_patience < 1) throw ConfigError("decrease_patience must be >= 1");
  if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
}

double DemoLogLikGivenLevels(const Trajectory& trajectory,
                             std::span<const int> levels,
                             const LevelPolicySet& policies) {
  double total = 0.0;
  for (int t = 0; t < trajectory.size(); ++t) {
    const int s = trajectory.states[t];
    for (int i = 0; i < policies.num_agents(); ++i) {
      total += std::log(
          policies.Get(i, levels[i]).Policy(s, trajectory.joint_actions[t][i]));
    }
  }
  return total;
}

namespace {

struct DemoTerm {
  double loglik = 0.0;
  std::vector<double> gradient;
};

DemoTerm DemoContribution(const Trajectory& traj,
                          const LevelPolicySet& policies,
                          std::span<const int> levels, int M,
                          bool with_gradient) {
  const int n = policies.num_agents();
  const int K = static_cast<int>(levels.size());
  // Per agent and level: log-likelihood of the agent's own actions and its
  // gradient.
  std::vector<std::vector<double>> ll(n, std::vector<double>(K, 0.0));
  std::vector<std::vector<double>> dll(
      n, std::vector<double>(with_gradient ? K * M : 0, 0.0));
  for (int t = 0; t < traj.size(); ++t) {
    const int s = traj.states[t];
    for (int i = 0; i < n; ++i) {
      const int a = traj.joint_actions[t][i];
      for (int k = 0; k < K; ++k) {
        const LevelTable& table = policies.Get(i, levels[k]);
        const double p = table.Policy(s, a);
        ll[i][k] += std::log(p);
        if (with_gradient) {
          auto dp = table.PolicyGrad(s, a);
          for (int m = 0; m < M; ++m) dll[i][k * M + m] += dp[m] / p;
        }
      }
    }
  }
  const LevelPosterior post =
      InferTrajectory(traj, policies, levels, with_gradient);

  DemoTerm term;
  if (with_gradient) term.gradient.assign(M, 0.0);
  int profiles = 1;
  for (int i = 0; i < n; ++i) profiles *= K;
  std::vector<int> kbar(n);
  std::vector<double> dlog(M), dprob(M);
  for (int idx = 0; idx < profiles; ++idx) {
    for (int i = n - 1, r = idx; i >= 0; --i, r /= K) kbar[i] = r % K;
    double log_p = 0.0;
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      log_p += ll[i][kbar[i]];
      prob *= post.probs[i][kbar[i]];
    }
    term.loglik += log_p * prob;
    if (!with_gradient) continue;
    std::fill(dlog.begin(), dlog.end(), 0.0);
    std::fill(dprob.begin(), dprob.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double* d = dll[i].data() + kbar[i] * M;
      for (int m = 0; m < M; ++m) dlog[m] += d[m];
      double others = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) others *= post.probs[j][kbar[j]];
      }
      auto dp = post.Grad(i, kbar[i]);
      for (int m = 0; m < M; ++m) dprob[m] += dp[m] * others;
    }
    for (int m = 0; m < M; ++m) {
      term.gradient[m] += dlog[m] * prob + log_p * dprob[m];
    }
  }
  return term;
}

}  // namespace

ObjectiveValue ExpectedLogLik(const Dataset& demos,
                              const LevelPolicySet& policies,
                              std::span<const int> levels,
                              std::span<const double> weights, double l2,
                              bool with_gradient, int workers) {
  const int M = static_cast<int>(weights.size());
  std::vector<DemoTerm> terms(demos.size());
  ParallelFor(static_cast<int>(demos.size()), workers, [&](int d) {
    terms[d] = DemoContribution(demos[d], policies, levels, M, with_gradient);
  });
  ObjectiveValue out;
  if (with_gradient) out.gradient.assign(M, 0.0);
  for (const DemoTerm& term : terms) {
    out.loglik += term.loglik;
    if (!with_gradient) continue;
    for (int m = 0; m < M; ++m) out.gradient[m] += term.gradient[m];
  }
  double sq = 0.0;
  for (int m = 0; m < M; ++m) {
    sq += weights[m] * weights[m];
    if (with_gradient) out.gradient[m] -= 2.0 * l2 * weights[m];
  }
  out.objective = out.loglik - l2 * sq;
  return out;
}

namespace {

std::string FormatWeights(std::span<const double> w) {
  std::ostringstream out;
  out.precision(17);
  out << "[";
  for (std::size_t m = 0; m < w.size(); ++m) out << (m ? ", " : "") << w[m];
  out << "]";
  return out.str();
}

}  // namespace

ObjectiveValue ObjectiveAndGradient(const Dataset& demos, const GameSpec& spec,
                                    std::span<const double> weights,
                                    const SolverConfig& solver,
                                    const LearnerConfig& learner,
                                    bool with_gradient) {
  if (learner.algorithm == Algorithm::kLeaderFollower) {
    return LfObjectiveAndGradient(demos, spec, weights, solver, learner,
                                  with_gradient);
  }
  SolverConfig sc = solver;
  sc.compute_gradients = with_gradient;
  std::vector<int> levels;
  if (learner.algorithm == Algorithm::kPr2) {
    sc.k_max = 1;
    levels = {1};
  } else {
    levels = MakeLevelSet(sc.k_max, learner.include_level_zero);
  }
  const RewardModel model(spec, {weights.begin(), weights.end()});
  LevelPolicySet policies;
  try {
    policies = SolveAll(spec, model, sc);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(
        std::string(e.what()) + " at weights " + FormatWeights(weights),
        e.residual());
  }
  return ExpectedLogLik(demos, policies, levels, weights, learner.l2,
                        with_gradient, learner.workers);
}

std::vector<double> ProjectedGradient(std::span<const double> weights,
                                      std::span<const double> gradient) {
  std::vector<double> out(gradient.begin(), gradient.end());
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (weights[m] <= 0.0 && out[m] < 0.0) out[m] = 0.0;
  }
  return out;
}

std::vector<double> InitialWeights(int num_params,
                                   const LearnerConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(config.init_low,
                                              config.init_high);
  std::vector<double> w(num_params);
  for (double& x : w) x = dist(rng);
  return w;
}

LearnResult Ascend(
    const GameSpec& spec, const LearnerConfig& config,
    const std::function<ObjectiveValue(std::span<const double>)>& evaluate) {
  config.Validate();
  const int M = spec.NumParams();
  std::vector<double> w = InitialWeights(M, config);
  LearnResult result;
  double eta = config.eta;
  double previous = 0.0;
  int decreases = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const ObjectiveValue value = evaluate(w);
    const auto pg = ProjectedGradient(w, value.gradient);
    double norm = 0.0;
    for (double g : pg) norm += g * g;
    norm = std::sqrt(norm);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.weights = w;
    rec.loglik = value.loglik;
    rec.objective = value.objective;
    rec.grad_norm = norm;
    rec.eta = eta;
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    result.records.push_back(std::move(rec));

    if (epoch > 0 && value.objective < previous) {
      ++decreases;
    } else {
      decreases = 0;
    }
    previous = value.objective;
    if (norm < config.grad_tol) {
      result.converged = true;
      break;
    }
    if (decreases >= config.decrease_patience) {
      if (result.halvings >= config.max_halvings) {
        std::ostringstream msg;
        msg << "objective decreased for " << decreases
            << " consecutive epochs after " << result.halvings
            << " halvings of eta (eta " << eta << ", epoch " << epoch
            << ", objective " << value.objective << ")";
        throw NonConvergenceError(msg.str(), norm);
      }
      eta *= 0.5;
      ++result.halvings;
      decreases = 0;
    }
    if (epoch + 1 == config.max_epochs) break;
    for (int m = 0; m < M; ++m) {
      w[m] = std::max(0.0, w[m] + eta * value.gradient[m]);
    }
  }
  result.model = RewardModel(spec, result.records.back().weights);
  return result;
}

LearnResult Learn(const Dataset& demos, const GameSpec& spec,
                  const LearnerConfig& learner, const SolverConfig& solver) {
  if (learner.algorithm == Algorithm::kLeaderFollower) {
    return LearnLf(demos, spec, learner, solver);
  }
  if (demos.empty()) throw InputError("no demonstrations to learn from");
  for (const auto& d : demos) CheckTrajectory(spec, d);
  solver.Validate(spec);
  return Ascend(spec, learner, [&](std::span<const double> w) {
    return ObjectiveAndGradient(demos, spec, w, solver, learner, true);
  });
}

LearnResult LearnPr2(const Dataset& demos, const GameSpec& spec,
                     const LearnerConfig& learner, const SolverConfig& solver) {
  LearnerConfig config = learner;
  config.algorithm = Algorithm::kPr2;
  return Learn(demos, spec, config, solver);
}

}  // namespace qlk_irl
