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

#ifndef QLK_IRL_ENVS_ENVIRONMENT_H_
#define QLK_IRL_ENVS_ENVIRONMENT_H_

#include <string>
#include <vector>

#include "qlk_irl/game.h"

namespace qlk_irl {

// An environment owns a GameSpec plus the mapping between dense state
// indices and structured, physical quantities.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual const GameSpec& spec() const = 0;
  // Sampling period recorded on trajectories, in seconds.
  virtual double dt() const = 0;
  // Positions and speeds in physical units, used for trajectory distances.
  virtual std::vector<double> PhysicalState(int state) const = 0;
  virtual std::string ActionName(int agent, int action) const = 0;
  virtual std::string DescribeState(int state) const = 0;
};

}  // namespace qlk_irl

#endif  // QLK_IRL_ENVS_ENVIRONMENT_H_
