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

#ifndef QLK_IRL_ENVS_IMPORTER_H_
#define QLK_IRL_ENVS_IMPORTER_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "qlk_irl/envs/driving.h"
#include "qlk_irl/game.h"

namespace qlk_irl {

// One timestamped observation of both cars in continuous coordinates.
struct DrivingRecord {
  double t = 0.0;
  double x1 = 0.0, y1 = 0.0, v1 = 0.0;
  double x2 = 0.0, y2 = 0.0, v2 = 0.0;
};

struct ImportResult {
  Trajectory trajectory;
  std::vector<std::string> warnings;
};

// Snaps every record to its nearest grid cell (saturating at the bounds,
// with a warning) and reconstructs each step's joint action as the one whose
// predicted successor lies nearest, in grid coordinates, to the next
// observed state. The last step gets the stationary actions. Throws
// ImportError for non-uniform timestamps or missing/non-finite values.
ImportResult ImportTrajectory(const std::vector<DrivingRecord>& records,
                              const DrivingEnv& env);

// CSV with header t,x1,y1,v1,x2,y2,v2. Empty fields become NaN and are
// rejected by ImportTrajectory with the offending record index.
std::vector<DrivingRecord> ReadDrivingCsv(std::istream& in);
void WriteDrivingCsv(std::ostream& out,
                     const std::vector<DrivingRecord>& records);

// Continuous records for a grid trajectory (the inverse of snapping).
std::vector<DrivingRecord> ExportRecords(const DrivingEnv& env,
                                         const Trajectory& trajectory);

}  // namespace qlk_irl

#endif  // QLK_IRL_ENVS_IMPORTER_H_
