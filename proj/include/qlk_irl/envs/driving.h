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

#ifndef QLK_IRL_ENVS_DRIVING_H_
#define QLK_IRL_ENVS_DRIVING_H_

#include <span>
#include <string>
#include <vector>

#include "qlk_irl/envs/environment.h"

namespace qlk_irl {

// Two-car forced merge. Car 0 starts in the lower lane and must merge into
// the upper lane, which car 1 occupies, before the dead-end.
//
// Speed levels are (level + 1) * speed_unit with speed_unit =
// v_max / max(n_v1, n_v2), and one longitudinal cell is speed_unit * dt
// long, so a car at level j advances exactly j + 1 cells per step. The
// merging car therefore always makes progress and every episode ends within
// n_x1 steps.
struct DrivingConfig {
  int n_x1 = 50;
  int n_y1 = 4;
  int n_x2 = 50;
  int n_v1 = 5;
  int n_v2 = 5;
  double v_max = 25.0;    // m/s
  double a_max = 0.0;     // m/s^2; 0 selects one speed level per step
  double d_safe = 10.0;   // m
  double y_0 = 0.0;       // lateral start of the merging car, m
  double y_l = 3.5;       // lateral coordinate of the target lane, m
  double dt = 0.5;        // s
  int dead_end = -1;      // longitudinal cell of the dead-end; -1 = n_x1 - 1
  int merge_gap = 2;      // cells between cars needed to complete a merge
  double discount = 0.95;
};

// 12x4x12x3x3 grid used by tests and the acceptance suite.
DrivingConfig MiniDrivingConfig();

enum MergingCarAction { kAccelerate = 0, kDecelerate = 1, kMaintain = 2,
                        kMerge = 3 };

// Grid coordinates. a1 / a2 hold the last applied acceleration in speed
// levels per step (-1, 0, +1); the comfort feature reads them.
struct DrivingState {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int v1 = 0;
  int v2 = 0;
  int a1 = 0;
  int a2 = 0;

  bool operator==(const DrivingState&) const = default;
};

// (v / v_max)^2 + (y_eff / y_span)^2.
double ProgressFeature(double v, double v_max, double y_eff, double y_span);
// 1 - (a / a_max)^2: larger is smoother.
double ComfortFeature(double a, double a_max);
// sum_i (min(d_i, d_safe) / d_safe)^2.
double SafetyFeature(std::span<const double> distances, double d_safe);

class DrivingEnv : public Environment {
 public:
  explicit DrivingEnv(const DrivingConfig& config);

  std::string id() const override { return "driving"; }
  const GameSpec& spec() const override { return spec_; }
  double dt() const override { return config_.dt; }
  // (x1, y1, x2, v1, v2) in meters and m/s.
  std::vector<double> PhysicalState(int state) const override;
  std::string ActionName(int agent, int action) const override;
  std::string DescribeState(int state) const override;

  // Mixed radix over (x1, y1, x2, v1, v2, a1 + 1, a2 + 1), x1 most
  // significant. Index 0 is the all-minimum state.
  int Encode(const DrivingState& state) const;
  DrivingState Decode(int index) const;
  // Applies one step of the grid kinematics, ignoring terminal absorption.
  DrivingState Step(const DrivingState& state, int action1, int action2) const;
  bool IsTerminal(const DrivingState& state) const;

  const DrivingConfig& config() const { return config_; }
  double speed_unit() const { return speed_unit_; }
  double cell_length() const { return speed_unit_ * config_.dt; }
  double lateral_cell() const;
  double accel_unit() const { return speed_unit_ / config_.dt; }
  double a_max() const { return a_max_; }
  int target_lane() const { return config_.n_y1 - 1; }
  double Speed(int level) const { return (level + 1) * speed_unit_; }
  double LateralPosition(int y1) const;

 private:
  void Build();
  std::vector<double> FeaturesOf(const DrivingState& state, int car) const;

  DrivingConfig config_;
  double speed_unit_ = 0.0;
  double a_max_ = 0.0;
  GameSpec spec_;
};

// "Upper car yields" when, at the first step where the merging car reaches
// the target lane (or the final step if it never does), x2 + v2 * dt < x1.
bool UpperCarYields(const DrivingEnv& env, const Trajectory& trajectory);

}  // namespace qlk_irl

#endif  // QLK_IRL_ENVS_DRIVING_H_
