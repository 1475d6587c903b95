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

#include "qlk_irl/envs/driving.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "qlk_irl/error.h"

namespace qlk_irl {
namespace {

constexpr int kAccelLevels = 3;
constexpr const char* kMergingActionNames[] = {"accelerate", "decelerate",
                                               "maintain", "merge"};

}  // namespace

DrivingConfig MiniDrivingConfig() {
  DrivingConfig config;
  config.n_x1 = 12;
  config.n_y1 = 4;
  config.n_x2 = 12;
  config.n_v1 = 3;
  config.n_v2 = 3;
  config.v_max = 15.0;
  config.d_safe = 5.0;
  return config;
}

double ProgressFeature(double v, double v_max, double y_eff, double y_span) {
  const double speed = v / v_max;
  const double lateral = y_eff / y_span;
  return speed * speed + lateral * lateral;
}

double ComfortFeature(double a, double a_max) {
  const double ratio = a / a_max;
  return 1.0 - ratio * ratio;
}

double SafetyFeature(std::span<const double> distances, double d_safe) {
  double total = 0.0;
  for (double d : distances) {
    const double ratio = std::min(d, d_safe) / d_safe;
    total += ratio * ratio;
  }
  return total;
}

DrivingEnv::DrivingEnv(const DrivingConfig& config) : config_(config) {
  if (config_.n_x1 < 2 || config_.n_y1 < 2 || config_.n_x2 < 1 ||
      config_.n_v1 < 1 || config_.n_v2 < 1) {
    throw ConfigError("driving grid dimensions must be positive (n_x1 and "
                      "n_y1 at least 2)");
  }
  if (config_.y_l == config_.y_0) throw ConfigError("y_l must differ from y_0");
  if (!(config_.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(config_.v_max > 0.0)) throw ConfigError("v_max must be positive");
  if (!(config_.d_safe > 0.0)) throw ConfigError("d_safe must be positive");
  if (config_.merge_gap < 1) throw ConfigError("merge_gap must be >= 1");
  if (config_.dead_end < 0) config_.dead_end = config_.n_x1 - 1;
  if (config_.dead_end >= config_.n_x1) {
    throw ConfigError("dead_end lies beyond the grid");
  }
  speed_unit_ = config_.v_max / std::max(config_.n_v1, config_.n_v2);
  a_max_ = config_.a_max > 0.0 ? config_.a_max : accel_unit();
  if (a_max_ < accel_unit() * (1.0 - 1e-12)) {
    throw ConfigError("a_max is smaller than one speed level per step");
  }
  Build();
}

double DrivingEnv::lateral_cell() const {
  return (config_.y_l - config_.y_0) / (config_.n_y1 - 1);
}

double DrivingEnv::LateralPosition(int y1) const {
  return config_.y_0 + y1 * lateral_cell();
}

int DrivingEnv::Encode(const DrivingState& s) const {
  const auto check = [](int value, int count, const char* name) {
    if (value < 0 || value >= count) {
      throw InputError(std::string("driving component ") + name + "=" +
                       std::to_string(value) + " out of range");
    }
  };
  check(s.x1, config_.n_x1, "x1");
  check(s.y1, config_.n_y1, "y1");
  check(s.x2, config_.n_x2, "x2");
  check(s.v1, config_.n_v1, "v1");
  check(s.v2, config_.n_v2, "v2");
  check(s.a1 + 1, kAccelLevels, "a1");
  check(s.a2 + 1, kAccelLevels, "a2");
  int index = s.x1;
  index = index * config_.n_y1 + s.y1;
  index = index * config_.n_x2 + s.x2;
  index = index * config_.n_v1 + s.v1;
  index = index * config_.n_v2 + s.v2;
  index = index * kAccelLevels + (s.a1 + 1);
  index = index * kAccelLevels + (s.a2 + 1);
  return index;
}

DrivingState DrivingEnv::Decode(int index) const {
  if (index < 0 || index >= spec_.num_states) {
    throw InputError("driving state index " + std::to_string(index) +
                     " out of range");
  }
  DrivingState s;
  s.a2 = index % kAccelLevels - 1;
  index /= kAccelLevels;
  s.a1 = index % kAccelLevels - 1;
  index /= kAccelLevels;
  s.v2 = index % config_.n_v2;
  index /= config_.n_v2;
  s.v1 = index % config_.n_v1;
  index /= config_.n_v1;
  s.x2 = index % config_.n_x2;
  index /= config_.n_x2;
  s.y1 = index % config_.n_y1;
  s.x1 = index / config_.n_y1;
  return s;
}

DrivingState DrivingEnv::Step(const DrivingState& s, int action1,
                              int action2) const {
  DrivingState next = s;
  next.x1 = std::min(s.x1 + s.v1 + 1, config_.n_x1 - 1);
  next.x2 = std::min(s.x2 + s.v2 + 1, config_.n_x2 - 1);
  const auto speed = [](int v, int action, int levels) {
    if (action == kAccelerate) return std::min(v + 1, levels - 1);
    if (action == kDecelerate) return std::max(v - 1, 0);
    return v;
  };
  next.v1 = speed(s.v1, action1, config_.n_v1);
  next.v2 = speed(s.v2, action2, config_.n_v2);
  next.a1 = next.v1 - s.v1;
  next.a2 = next.v2 - s.v2;
  if (action1 == kMerge) next.y1 = std::min(s.y1 + 1, target_lane());
  return next;
}

bool DrivingEnv::IsTerminal(const DrivingState& s) const {
  if (s.x1 >= config_.dead_end) return true;
  if (s.y1 == target_lane()) {
    const int gap = std::abs(s.x1 - s.x2);
    return gap == 0 || gap >= config_.merge_gap;
  }
  return false;
}

std::vector<double> DrivingEnv::FeaturesOf(const DrivingState& s,
                                           int car) const {
  const double dx = (s.x1 - s.x2) * cell_length();
  const double dy = LateralPosition(s.y1) - config_.y_l;
  const double distance = std::hypot(dx, dy);
  const double safety = SafetyFeature(std::span<const double>(&distance, 1),
                                      config_.d_safe);
  if (car == 0) {
    return {ProgressFeature(Speed(s.v1), config_.v_max,
                            std::abs(LateralPosition(s.y1) - config_.y_0),
                            std::abs(config_.y_l - config_.y_0)),
            ComfortFeature(s.a1 * accel_unit(), a_max_), safety};
  }
  // The upper car is already in its lane and never translates laterally.
  return {ProgressFeature(Speed(s.v2), config_.v_max, 0.0, 1.0),
          ComfortFeature(s.a2 * accel_unit(), a_max_), safety};
}

void DrivingEnv::Build() {
  const std::size_t count = static_cast<std::size_t>(config_.n_x1) *
                            config_.n_y1 * config_.n_x2 * config_.n_v1 *
                            config_.n_v2 * kAccelLevels * kAccelLevels;
  if (count > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw ConfigError("driving grid is too large");
  }
  spec_.num_agents = 2;
  spec_.num_states = static_cast<int>(count);
  spec_.action_counts = {4, 3};
  spec_.feature_dims = {3, 3};
  spec_.stationary_actions = {kMaintain, kMaintain};
  spec_.discount = config_.discount;
  const int joint = 12;
  spec_.successor.assign(count * joint, 0);
  spec_.terminal.assign(count, 0);
  spec_.features.assign(2, std::vector<double>(count * 3, 0.0));
  for (int index = 0; index < spec_.num_states; ++index) {
    const DrivingState s = Decode(index);
    const bool terminal = IsTerminal(s);
    spec_.terminal[index] = terminal ? 1 : 0;
    for (int j = 0; j < joint; ++j) {
      spec_.successor[static_cast<std::size_t>(index) * joint + j] =
          terminal ? index : Encode(Step(s, j / 3, j % 3));
    }
    if (terminal) continue;
    for (int car = 0; car < 2; ++car) {
      const auto phi = FeaturesOf(s, car);
      std::copy(phi.begin(), phi.end(),
                spec_.features[car].begin() +
                    static_cast<std::size_t>(index) * 3);
    }
  }
  spec_.Validate();
}

std::vector<double> DrivingEnv::PhysicalState(int state) const {
  const DrivingState s = Decode(state);
  return {s.x1 * cell_length(), LateralPosition(s.y1), s.x2 * cell_length(),
          Speed(s.v1), Speed(s.v2)};
}

std::string DrivingEnv::ActionName(int agent, int action) const {
  if (agent < 0 || agent > 1 || action < 0 ||
      action >= spec_.action_counts[agent]) {
    throw InputError("driving action out of range");
  }
  return kMergingActionNames[action];
}

std::string DrivingEnv::DescribeState(int state) const {
  const DrivingState s = Decode(state);
  std::ostringstream out;
  out << "x1=" << s.x1 << " y1=" << s.y1 << " x2=" << s.x2 << " v1=" << s.v1
      << " v2=" << s.v2 << " a1=" << s.a1 << " a2=" << s.a2;
  return out.str();
}

bool UpperCarYields(const DrivingEnv& env, const Trajectory& trajectory) {
  if (trajectory.states.empty()) {
    throw InputError("cannot classify an empty trajectory");
  }
  int decision_step = trajectory.size() - 1;
  for (int t = 0; t < trajectory.size(); ++t) {
    if (env.Decode(trajectory.states[t]).y1 == env.target_lane()) {
      decision_step = t;
      break;
    }
  }
  const auto physical = env.PhysicalState(trajectory.states[decision_step]);
  const double x1 = physical[0];
  const double x2 = physical[2];
  const double v2 = physical[4];
  return x2 + v2 * env.dt() < x1;
}

}  // namespace qlk_irl
