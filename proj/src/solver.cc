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

#include "qlk_irl/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "qlk_irl/error.h"
#include "qlk_irl/parallel.h"

namespace qlk_irl {

double SolverConfig::Lambda(int agent) const {
  if (lambda.empty()) return 1.0;
  if (lambda.size() == 1) return lambda[0];
  return lambda.at(agent);
}

int SolverConfig::MaxIterations(double discount) const {
  if (vi_max_iters > 0) return vi_max_iters;
  double n = 10.0 * std::log(1.0 / vi_tol) / (1.0 - discount);
  if (!(n < 1e9)) n = 1e9;
  return std::max(1, static_cast<int>(std::ceil(n)));
}

void SolverConfig::Validate(const GameSpec& spec) const {
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  if (lambda.size() > 1 &&
      static_cast<int>(lambda.size()) != spec.num_agents) {
    throw ConfigError("lambda needs 1 or " + std::to_string(spec.num_agents) +
                      " entries, got " + std::to_string(lambda.size()));
  }
  for (double l : lambda) {
    if (!(l > 0.0 && l <= 1.0)) {
      throw ConfigError("lambda must lie in (0, 1], got " + std::to_string(l));
    }
  }
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw ConfigError("kappa must be >= 1");
  }
  if (!(vi_tol > 0.0)) throw ConfigError("vi_tol must be > 0");
  if (vi_max_iters < 0) throw ConfigError("vi_max_iters must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(spec.discount >= 0.0 && spec.discount < 1.0)) {
    throw ConfigError("discount must lie in [0, 1)");
  }
}

std::span<const double> LevelTable::QRow(int s) const {
  return {q.data() + static_cast<std::size_t>(s) * num_actions,
          static_cast<std::size_t>(num_actions)};
}

std::span<const double> LevelTable::PolicyRow(int s) const {
  return {policy.data() + static_cast<std::size_t>(s) * num_actions,
          static_cast<std::size_t>(num_actions)};
}

std::span<const double> LevelTable::QGrad(int s, int a) const {
  return {q_grad.data() +
              (static_cast<std::size_t>(s) * num_actions + a) * num_params,
          static_cast<std::size_t>(num_params)};
}

std::span<const double> LevelTable::PolicyGrad(int s, int a) const {
  return {policy_grad.data() +
              (static_cast<std::size_t>(s) * num_actions + a) * num_params,
          static_cast<std::size_t>(num_params)};
}

LevelPolicySet::LevelPolicySet(int num_agents, int k_max)
    : num_agents_(num_agents),
      k_max_(k_max),
      tables_(static_cast<std::size_t>(num_agents) * (k_max + 1)) {}

const LevelTable& LevelPolicySet::Get(int agent, int level) const {
  return *Shared(agent, level);
}

std::shared_ptr<const LevelTable> LevelPolicySet::Shared(int agent,
                                                         int level) const {
  if (agent < 0 || agent >= num_agents_ || level < 0 || level > k_max_) {
    throw InputError("no table for agent " + std::to_string(agent) +
                     " level " + std::to_string(level));
  }
  const auto& t = tables_[static_cast<std::size_t>(agent) * (k_max_ + 1) +
                          level];
  if (!t) throw InputError("table not solved");
  return t;
}

void LevelPolicySet::Set(int agent, int level,
                         std::shared_ptr<const LevelTable> table) {
  tables_.at(static_cast<std::size_t>(agent) * (k_max_ + 1) + level) =
      std::move(table);
}

namespace {

// x^kappa with repeated squaring for integral exponents.
inline double Power(double x, double kappa) {
  if (kappa <= 64.0 && kappa == std::floor(kappa)) {
    unsigned n = static_cast<unsigned>(kappa);
    double r = 1.0;
    while (n) {
      if (n & 1u) r *= x;
      x *= x;
      n >>= 1;
    }
    return r;
  }
  return std::pow(x, kappa);
}

}  // namespace

double PowerSum(std::span<const double> row, double kappa) {
  double m = 0.0;
  for (double x : row) m = std::max(m, x);
  if (m <= 0.0) return 0.0;
  double sum = 0.0;
  for (double x : row) sum += Power(x / m, kappa);
  return m * std::pow(sum, 1.0 / kappa);
}

double SmoothMax(std::span<const double> row, double kappa) {
  if (row.empty()) return 0.0;
  double m = 0.0;
  for (double x : row) m = std::max(m, x);
  if (m <= 0.0) return 0.0;
  double sum = 0.0;
  for (double x : row) sum += Power(x / m, kappa);
  return m * std::pow(sum / static_cast<double>(row.size()), 1.0 / kappa);
}

void SmoothMaxGradient(std::span<const double> row, double kappa,
                       std::span<double> out) {
  double v = SmoothMax(row, kappa);
  double inv_n = 1.0 / static_cast<double>(row.size());
  for (std::size_t a = 0; a < row.size(); ++a) {
    out[a] = v > 0.0 ? inv_n * Power(row[a] / v, kappa - 1.0) : 0.0;
  }
}

void QuantalResponse(std::span<const double> q_row, double lambda,
                     std::span<double> out) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : q_row) m = std::max(m, lambda * x);
  double z = 0.0;
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    out[a] = std::exp(lambda * q_row[a] - m);
    z += out[a];
  }
  for (std::size_t a = 0; a < q_row.size(); ++a) out[a] /= z;
}

namespace {

LevelTable MakeTable(const GameSpec& spec, int agent, double lambda,
                     bool gradients) {
  LevelTable t;
  t.num_states = spec.num_states;
  t.num_actions = spec.action_counts[agent];
  t.num_params = spec.NumParams();
  t.lambda = lambda;
  const std::size_t sa =
      static_cast<std::size_t>(t.num_states) * t.num_actions;
  t.q.assign(sa, 0.0);
  t.policy.assign(sa, 0.0);
  if (gradients) {
    t.q_grad.assign(sa * t.num_params, 0.0);
    t.policy_grad.assign(sa * t.num_params, 0.0);
  }
  return t;
}

// Fills policy (and policy_grad) from q (and q_grad).
void FinishPolicy(LevelTable& t) {
  const int A = t.num_actions;
  const int M = t.num_params;
  std::vector<double> mean(M);
  for (int s = 0; s < t.num_states; ++s) {
    const std::size_t row = static_cast<std::size_t>(s) * A;
    QuantalResponse({t.q.data() + row, static_cast<std::size_t>(A)},
                    t.lambda, {t.policy.data() + row,
                               static_cast<std::size_t>(A)});
    if (!t.has_gradients()) continue;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (int a = 0; a < A; ++a) {
      const double* g = t.q_grad.data() + (row + a) * M;
      for (int m = 0; m < M; ++m) mean[m] += t.policy[row + a] * g[m];
    }
    for (int a = 0; a < A; ++a) {
      const double* g = t.q_grad.data() + (row + a) * M;
      double* out = t.policy_grad.data() + (row + a) * M;
      const double scale = t.lambda * t.policy[row + a];
      for (int m = 0; m < M; ++m) out[m] = scale * (g[m] - mean[m]);
    }
  }
}

std::string Where(int agent) {
  return "agent " + std::to_string(agent);
}

}  // namespace

LevelTable SolveLevelZero(const GameSpec& spec, const RewardModel& model,
                          const SolverConfig& config, int agent,
                          double lambda) {
  LevelTable t = MakeTable(spec, agent, lambda, config.compute_gradients);
  const int A = t.num_actions;
  const int M = t.num_params;
  const int offset = spec.ParamOffset(agent);
  const auto rewards = RewardTable(model, spec, agent);
  std::vector<int> actions = spec.stationary_actions;
  for (int s = 0; s < spec.num_states; ++s) {
    for (int a = 0; a < A; ++a) {
      actions[agent] = a;
      const int next = spec.Next(s, actions);
      const std::size_t idx = static_cast<std::size_t>(s) * A + a;
      t.q[idx] = rewards[next];
      if (t.has_gradients()) {
        auto phi = spec.Features(agent, next);
        std::copy(phi.begin(), phi.end(),
                  t.q_grad.begin() + idx * M + offset);
      }
    }
  }
  FinishPolicy(t);
  return t;
}

LevelTable SolveLevelK(const GameSpec& spec, const RewardModel& model,
                       const SolverConfig& config, int agent, double lambda,
                       std::span<const LevelTable* const> opponents_prev) {
  const int n = spec.num_agents;
  if (static_cast<int>(opponents_prev.size()) != n) {
    throw InputError("opponent table list must have one entry per agent");
  }
  for (int j = 0; j < n; ++j) {
    if (j != agent && opponents_prev[j] == nullptr) {
      throw InputError("missing opponent table for agent " +
                       std::to_string(j));
    }
    if (j != agent && config.compute_gradients &&
        !opponents_prev[j]->has_gradients()) {
      throw InputError("opponent table lacks gradients");
    }
  }
  LevelTable t = MakeTable(spec, agent, lambda, config.compute_gradients);
  const int S = spec.num_states;
  const int A = t.num_actions;
  const int J = spec.NumJointActions();
  const int M = t.num_params;
  const double gamma = spec.discount;
  const int max_iters = config.MaxIterations(gamma);
  const auto rewards = RewardTable(model, spec, agent);

  // Joint actions grouped by this agent's own action.
  std::vector<int> joint_actions(static_cast<std::size_t>(J) * n);
  std::vector<std::vector<int>> by_own(A);
  for (int joint = 0; joint < J; ++joint) {
    auto acts = spec.DecodeJoint(joint);
    std::copy(acts.begin(), acts.end(), joint_actions.begin() + joint * n);
    by_own[acts[agent]].push_back(joint);
  }

  // Opponent joint-action probabilities w(s, joint).
  std::vector<double> w(static_cast<std::size_t>(S) * J, 0.0);
  for (int s = 0; s < S; ++s) {
    for (int joint = 0; joint < J; ++joint) {
      double p = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == agent) continue;
        p *= opponents_prev[j]->Policy(s, joint_actions[joint * n + j]);
      }
      w[static_cast<std::size_t>(s) * J + joint] = p;
    }
  }

  std::vector<double> v(S, 0.0);
  std::vector<double> next_q(t.q.size(), 0.0);
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iters; ++iter) {
    for (int s = 0; s < S; ++s) v[s] = SmoothMax(t.QRow(s), config.kappa);
    residual = 0.0;
    for (int s = 0; s < S; ++s) {
      const std::size_t row = static_cast<std::size_t>(s) * A;
      if (spec.IsTerminal(s)) {
        std::fill_n(next_q.begin() + row, A, 0.0);
        continue;
      }
      for (int a = 0; a < A; ++a) {
        double sum = 0.0;
        for (int joint : by_own[a]) {
          const int next = spec.NextJoint(s, joint);
          sum += w[static_cast<std::size_t>(s) * J + joint] *
                 (rewards[next] + gamma * v[next]);
        }
        residual = std::max(residual, std::abs(sum - t.q[row + a]));
        next_q[row + a] = sum;
      }
    }
    t.q.swap(next_q);
    t.stats.q_iterations = iter;
    if (config.record_residuals) t.stats.q_residuals.push_back(residual);
    if (residual < config.vi_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "Q value iteration did not converge for " << Where(agent)
        << " after " << max_iters << " iterations (residual " << residual
        << ")";
    throw NonConvergenceError(msg.str(), residual);
  }

  if (config.compute_gradients) {
    const int offset = spec.ParamOffset(agent);
    for (int s = 0; s < S; ++s) v[s] = SmoothMax(t.QRow(s), config.kappa);
    std::vector<double> c(t.q.size());
    for (int s = 0; s < S; ++s) {
      SmoothMaxGradient(t.QRow(s), config.kappa,
                        {c.data() + static_cast<std::size_t>(s) * A,
                         static_cast<std::size_t>(A)});
    }
    // Constant part: derivative of the opponent weights times the continuation
    // value, plus the direct reward-feature term.
    std::vector<double> base(t.q_grad.size(), 0.0);
    std::vector<double> dw(M);
    for (int s = 0; s < S; ++s) {
      if (spec.IsTerminal(s)) continue;
      for (int joint = 0; joint < J; ++joint) {
        const int* acts = joint_actions.data() + joint * n;
        std::fill(dw.begin(), dw.end(), 0.0);
        for (int j = 0; j < n; ++j) {
          if (j == agent) continue;
          double others = 1.0;
          for (int l = 0; l < n; ++l) {
            if (l == agent || l == j) continue;
            others *= opponents_prev[l]->Policy(s, acts[l]);
          }
          auto dpi = opponents_prev[j]->PolicyGrad(s, acts[j]);
          for (int m = 0; m < M; ++m) dw[m] += others * dpi[m];
        }
        const int next = spec.NextJoint(s, joint);
        const double target = rewards[next] + gamma * v[next];
        const double wj = w[static_cast<std::size_t>(s) * J + joint];
        double* out =
            base.data() + (static_cast<std::size_t>(s) * A + acts[agent]) * M;
        for (int m = 0; m < M; ++m) out[m] += dw[m] * target;
        auto phi = spec.Features(agent, next);
        for (std::size_t f = 0; f < phi.size(); ++f) {
          out[offset + f] += wj * phi[f];
        }
      }
    }

    std::vector<double> dv(static_cast<std::size_t>(S) * M, 0.0);
    std::vector<double> next_g(t.q_grad.size(), 0.0);
    converged = false;
    residual = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= max_iters; ++iter) {
      std::fill(dv.begin(), dv.end(), 0.0);
      for (int s = 0; s < S; ++s) {
        double* d = dv.data() + static_cast<std::size_t>(s) * M;
        for (int a = 0; a < A; ++a) {
          const std::size_t idx = static_cast<std::size_t>(s) * A + a;
          const double ca = c[idx];
          if (ca == 0.0) continue;
          const double* g = t.q_grad.data() + idx * M;
          for (int m = 0; m < M; ++m) d[m] += ca * g[m];
        }
      }
      residual = 0.0;
      for (int s = 0; s < S; ++s) {
        if (spec.IsTerminal(s)) continue;
        for (int a = 0; a < A; ++a) {
          const std::size_t idx = static_cast<std::size_t>(s) * A + a;
          double* out = next_g.data() + idx * M;
          const double* b = base.data() + idx * M;
          for (int m = 0; m < M; ++m) out[m] = b[m];
          for (int joint : by_own[a]) {
            const double wj = gamma * w[static_cast<std::size_t>(s) * J + joint];
            if (wj == 0.0) continue;
            const double* d =
                dv.data() +
                static_cast<std::size_t>(spec.NextJoint(s, joint)) * M;
            for (int m = 0; m < M; ++m) out[m] += wj * d[m];
          }
          const double* old = t.q_grad.data() + idx * M;
          for (int m = 0; m < M; ++m) {
            residual = std::max(residual, std::abs(out[m] - old[m]));
          }
        }
      }
      t.q_grad.swap(next_g);
      t.stats.grad_iterations = iter;
      if (config.record_residuals) t.stats.grad_residuals.push_back(residual);
      if (residual < config.vi_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "gradient value iteration did not converge for " << Where(agent)
          << " after " << max_iters << " iterations (residual " << residual
          << ")";
      throw NonConvergenceError(msg.str(), residual);
    }
  }
  FinishPolicy(t);
  return t;
}

LevelPolicySet SolveAll(const GameSpec& spec, const RewardModel& model,
                        const SolverConfig& config) {
  config.Validate(spec);
  const int n = spec.num_agents;
  const int K = config.k_max;
  using Stack = std::vector<std::vector<std::shared_ptr<const LevelTable>>>;
  std::map<double, Stack> stacks;
  for (int i = 0; i < n; ++i) stacks.emplace(config.Lambda(i), Stack());

  for (auto& [lambda, stack] : stacks) {
    const double lam = lambda;
    stack.assign(n, std::vector<std::shared_ptr<const LevelTable>>(K + 1));
    ParallelFor(n, config.workers, [&](int i) {
      stack[i][0] = std::make_shared<const LevelTable>(
          SolveLevelZero(spec, model, config, i, lam));
    });
    for (int k = 1; k <= K; ++k) {
      std::vector<const LevelTable*> prev(n);
      for (int j = 0; j < n; ++j) prev[j] = stack[j][k - 1].get();
      ParallelFor(n, config.workers, [&](int i) {
        try {
          stack[i][k] = std::make_shared<const LevelTable>(
              SolveLevelK(spec, model, config, i, lam, prev));
        } catch (const NonConvergenceError& e) {
          throw NonConvergenceError(
              "level " + std::to_string(k) + ": " + e.what(), e.residual());
        }
      });
    }
  }

  LevelPolicySet set(n, K);
  for (int i = 0; i < n; ++i) {
    const Stack& stack = stacks.at(config.Lambda(i));
    for (int k = 0; k <= K; ++k) set.Set(i, k, stack[i][k]);
  }
  return set;
}

}  // namespace qlk_irl
