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

#include "qlk_irl/envs/importer.h"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qlk_irl/error.h"

namespace qlk_irl {
namespace {

constexpr double kTimeTolerance = 1e-6;

// Nearest index in [0, count) to `value`, recording a warning on saturation.
int Snap(double value, int count, const char* name, int record,
         std::vector<std::string>* warnings) {
  const long nearest = std::lround(value);
  if (nearest < 0 || nearest >= count) {
    warnings->push_back("record " + std::to_string(record) + ": " + name +
                        " outside the grid, snapped to the boundary");
    return nearest < 0 ? 0 : count - 1;
  }
  return static_cast<int>(nearest);
}

double GridDistance(const DrivingState& a, const DrivingState& b) {
  const double terms[] = {
      static_cast<double>(a.x1 - b.x1), static_cast<double>(a.y1 - b.y1),
      static_cast<double>(a.x2 - b.x2), static_cast<double>(a.v1 - b.v1),
      static_cast<double>(a.v2 - b.v2), static_cast<double>(a.a1 - b.a1),
      static_cast<double>(a.a2 - b.a2)};
  double total = 0.0;
  for (double term : terms) total += term * term;
  return std::sqrt(total);
}

// Candidate order with the stationary action first, so ties resolve to it.
std::vector<int> CandidateOrder(int count, int stationary) {
  std::vector<int> order = {stationary};
  for (int a = 0; a < count; ++a) {
    if (a != stationary) order.push_back(a);
  }
  return order;
}

}  // namespace

ImportResult ImportTrajectory(const std::vector<DrivingRecord>& records,
                              const DrivingEnv& env) {
  const auto& config = env.config();
  ImportResult result;
  if (records.empty()) throw ImportError(0, "no records");

  std::vector<DrivingState> states;
  for (int r = 0; r < static_cast<int>(records.size()); ++r) {
    const DrivingRecord& rec = records[r];
    for (double value : {rec.t, rec.x1, rec.y1, rec.v1, rec.x2, rec.v2}) {
      if (!std::isfinite(value)) {
        throw ImportError(r, "missing or non-finite value for a car");
      }
    }
    if (r > 0 && std::abs(rec.t - records[r - 1].t - config.dt) >
                     kTimeTolerance) {
      throw ImportError(r, "timestamps are not uniformly spaced by " +
                               std::to_string(config.dt) + " s");
    }
    DrivingState s;
    s.x1 = Snap(rec.x1 / env.cell_length(), config.n_x1, "x1", r,
                &result.warnings);
    s.y1 = Snap((rec.y1 - config.y_0) / env.lateral_cell(), config.n_y1,
                "y1", r, &result.warnings);
    s.x2 = Snap(rec.x2 / env.cell_length(), config.n_x2, "x2", r,
                &result.warnings);
    s.v1 = Snap(rec.v1 / env.speed_unit() - 1.0, config.n_v1, "v1", r,
                &result.warnings);
    s.v2 = Snap(rec.v2 / env.speed_unit() - 1.0, config.n_v2, "v2", r,
                &result.warnings);
    if (!states.empty()) {
      s.a1 = std::clamp(s.v1 - states.back().v1, -1, 1);
      s.a2 = std::clamp(s.v2 - states.back().v2, -1, 1);
    }
    states.push_back(s);
  }

  const GameSpec& spec = env.spec();
  const auto order1 = CandidateOrder(spec.action_counts[0],
                                     spec.stationary_actions[0]);
  const auto order2 = CandidateOrder(spec.action_counts[1],
                                     spec.stationary_actions[1]);
  Trajectory& trajectory = result.trajectory;
  trajectory.env_id = env.id();
  trajectory.dt = config.dt;
  trajectory.imported = true;
  for (std::size_t t = 0; t < states.size(); ++t) {
    trajectory.states.push_back(env.Encode(states[t]));
    std::vector<int> best = {spec.stationary_actions[0],
                             spec.stationary_actions[1]};
    if (t + 1 < states.size()) {
      double best_distance = std::numeric_limits<double>::infinity();
      for (int a1 : order1) {
        for (int a2 : order2) {
          const double distance =
              GridDistance(env.Step(states[t], a1, a2), states[t + 1]);
          if (distance < best_distance) {
            best_distance = distance;
            best = {a1, a2};
          }
        }
      }
    }
    trajectory.joint_actions.push_back(best);
  }
  return result;
}

std::vector<DrivingRecord> ReadDrivingCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ImportError(0, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x1,y1,v1,x2,y2,v2") {
    throw ImportError(0, "expected header t,x1,y1,v1,x2,y2,v2");
  }
  std::vector<DrivingRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      if (field.find_first_not_of(" \t") == std::string::npos) {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ImportError(static_cast<int>(records.size()),
                          "unparseable field '" + field + "'");
      }
    }
    if (!line.empty() && line.back() == ',') {
      values.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    while (values.size() < 7) {
      values.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    if (values.size() > 7) {
      throw ImportError(static_cast<int>(records.size()), "too many fields");
    }
    records.push_back({values[0], values[1], values[2], values[3], values[4],
                       values[5], values[6]});
  }
  return records;
}

void WriteDrivingCsv(std::ostream& out,
                     const std::vector<DrivingRecord>& records) {
  out << "t,x1,y1,v1,x2,y2,v2\n";
  out.precision(17);
  for (const auto& r : records) {
    out << r.t << ',' << r.x1 << ',' << r.y1 << ',' << r.v1 << ',' << r.x2
        << ',' << r.y2 << ',' << r.v2 << '\n';
  }
}

std::vector<DrivingRecord> ExportRecords(const DrivingEnv& env,
                                         const Trajectory& trajectory) {
  std::vector<DrivingRecord> records;
  for (int t = 0; t < trajectory.size(); ++t) {
    const auto p = env.PhysicalState(trajectory.states[t]);
    records.push_back({t * env.dt(), p[0], p[1], p[3], p[2],
                       env.config().y_l, p[4]});
  }
  return records;
}

}  // namespace qlk_irl
