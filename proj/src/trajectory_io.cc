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

#include "qlk_irl/trajectory_io.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "qlk_irl/error.h"

namespace qlk_irl {

using nlohmann::json;

std::string TrajectoryToJsonLine(const Trajectory& trajectory) {
  json record;
  record["env"] = trajectory.env_id;
  record["dt"] = trajectory.dt;
  record["states"] = trajectory.states;
  record["actions"] = trajectory.joint_actions;
  if (trajectory.gt_levels) record["gt_levels"] = *trajectory.gt_levels;
  if (trajectory.gt_weights) record["gt_weights"] = *trajectory.gt_weights;
  if (trajectory.imported) record["imported"] = true;
  return record.dump();
}

Trajectory TrajectoryFromJsonLine(const std::string& line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed trajectory record: ") + e.what());
  }
  Trajectory trajectory;
  try {
    trajectory.env_id = record.at("env").get<std::string>();
    trajectory.dt = record.at("dt").get<double>();
    trajectory.states = record.at("states").get<std::vector<int>>();
    trajectory.joint_actions =
        record.at("actions").get<std::vector<std::vector<int>>>();
    if (record.contains("gt_levels")) {
      trajectory.gt_levels = record["gt_levels"].get<std::vector<int>>();
    }
    if (record.contains("gt_weights")) {
      trajectory.gt_weights =
          record["gt_weights"].get<std::vector<std::vector<double>>>();
    }
    trajectory.imported = record.value("imported", false);
  } catch (const json::exception& e) {
    throw InputError(std::string("bad trajectory record: ") + e.what());
  }
  if (trajectory.states.size() != trajectory.joint_actions.size()) {
    throw InputError("trajectory record has mismatched states and actions");
  }
  return trajectory;
}

void WriteDataset(std::ostream& out, const Dataset& dataset) {
  for (const auto& trajectory : dataset) {
    out << TrajectoryToJsonLine(trajectory) << '\n';
  }
}

Dataset ReadDataset(std::istream& in) {
  Dataset dataset;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      dataset.push_back(TrajectoryFromJsonLine(line));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_number) + ": " +
                       e.what());
    }
  }
  return dataset;
}

void SaveDataset(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  WriteDataset(out, dataset);
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return ReadDataset(in);
}

}  // namespace qlk_irl
