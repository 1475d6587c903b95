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

#ifndef QLK_IRL_TRAJECTORY_IO_H_
#define QLK_IRL_TRAJECTORY_IO_H_

#include <iosfwd>
#include <string>

#include "qlk_irl/game.h"

namespace qlk_irl {

// Line-delimited JSON, one trajectory per line:
//   {"env": "...", "dt": 0.5, "states": [...], "actions": [[a1, a2], ...],
//    "gt_levels": [...], "gt_weights": [[...], [...]]}
// gt_levels / gt_weights are optional; "imported": true marks real data.
std::string TrajectoryToJsonLine(const Trajectory& trajectory);
Trajectory TrajectoryFromJsonLine(const std::string& line);

void WriteDataset(std::ostream& out, const Dataset& dataset);
Dataset ReadDataset(std::istream& in);

void SaveDataset(const std::string& path, const Dataset& dataset);
Dataset LoadDataset(const std::string& path);

}  // namespace qlk_irl

#endif  // QLK_IRL_TRAJECTORY_IO_H_
