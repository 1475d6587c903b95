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

#include "qlk_irl/envs/env_config.h"

#include <yaml-cpp/yaml.h>

#include "qlk_irl/error.h"

namespace qlk_irl {
namespace {

template <typename T>
void ReadIfPresent(const YAML::Node& node, const char* key, T* value) {
  if (!node[key]) return;
  try {
    *value = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("env.") + key + ": " + e.what());
  }
}

}  // namespace

PacmanConfig PacmanConfigFromYaml(const YAML::Node& env_node) {
  PacmanConfig config = DefaultPacmanConfig();
  ReadIfPresent(env_node, "maze", &config.maze);
  ReadIfPresent(env_node, "discount", &config.discount);
  return config;
}

DrivingConfig DrivingConfigFromYaml(const YAML::Node& env_node) {
  const std::string kind = env_node["kind"].as<std::string>("driving");
  DrivingConfig config =
      kind == "driving-mini" ? MiniDrivingConfig() : DrivingConfig();
  ReadIfPresent(env_node, "n_x1", &config.n_x1);
  ReadIfPresent(env_node, "n_y1", &config.n_y1);
  ReadIfPresent(env_node, "n_x2", &config.n_x2);
  ReadIfPresent(env_node, "n_v1", &config.n_v1);
  ReadIfPresent(env_node, "n_v2", &config.n_v2);
  ReadIfPresent(env_node, "v_max", &config.v_max);
  ReadIfPresent(env_node, "a_max", &config.a_max);
  ReadIfPresent(env_node, "d_safe", &config.d_safe);
  ReadIfPresent(env_node, "y_0", &config.y_0);
  ReadIfPresent(env_node, "y_l", &config.y_l);
  ReadIfPresent(env_node, "dt", &config.dt);
  ReadIfPresent(env_node, "dead_end", &config.dead_end);
  ReadIfPresent(env_node, "merge_gap", &config.merge_gap);
  ReadIfPresent(env_node, "discount", &config.discount);
  return config;
}

std::unique_ptr<Environment> EnvironmentFromYaml(const YAML::Node& env_node) {
  if (!env_node || !env_node.IsMap()) {
    throw ConfigError("config needs an `env` table");
  }
  std::string kind;
  ReadIfPresent(env_node, "kind", &kind);
  if (kind == "pacman") {
    return std::make_unique<PacmanEnv>(PacmanConfigFromYaml(env_node));
  }
  if (kind == "driving" || kind == "driving-mini") {
    return std::make_unique<DrivingEnv>(DrivingConfigFromYaml(env_node));
  }
  throw ConfigError("env.kind must be pacman, driving or driving-mini, got '" +
                    kind + "'");
}

std::unique_ptr<Environment> EnvironmentFromYamlText(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  return EnvironmentFromYaml(root["env"]);
}

}  // namespace qlk_irl
