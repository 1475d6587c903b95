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

#ifndef QLK_IRL_ENVS_ENV_CONFIG_H_
#define QLK_IRL_ENVS_ENV_CONFIG_H_

#include <memory>
#include <string>

#include "qlk_irl/envs/driving.h"
#include "qlk_irl/envs/environment.h"
#include "qlk_irl/envs/pacman.h"

namespace YAML {
class Node;
}

namespace qlk_irl {

// Builds an environment from the `env` table of a YAML config:
//
//   env:
//     kind: pacman          # or: driving, driving-mini
//     discount: 0.95
//     maze: |
//       P.o..
//       ..o.G
//
// Driving keys (all optional, defaulting to DrivingConfig):
//   n_x1, n_y1, n_x2, n_v1, n_v2, v_max, a_max, d_safe, y_0, y_l, dt,
//   dead_end, merge_gap.
std::unique_ptr<Environment> EnvironmentFromYaml(const YAML::Node& env_node);
std::unique_ptr<Environment> EnvironmentFromYamlText(const std::string& text);

PacmanConfig PacmanConfigFromYaml(const YAML::Node& env_node);
DrivingConfig DrivingConfigFromYaml(const YAML::Node& env_node);

}  // namespace qlk_irl

#endif  // QLK_IRL_ENVS_ENV_CONFIG_H_
