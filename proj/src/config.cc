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

#include "qlk_irl/config.h"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "qlk_irl/envs/env_config.h"
#include "qlk_irl/error.h"

namespace qlk_irl {
namespace {

void CheckKeys(const YAML::Node& node, const std::string& section,
               const std::set<std::string>& allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(section + " must be a table");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError("unknown key " + section + "." + key);
    }
  }
}

template <typename T>
void Read(const YAML::Node& node, const std::string& section, const char* key,
          T* value) {
  if (!node || !node[key]) return;
  try {
    *value = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a YAML table");
  CheckKeys(root, "config",
            {"env", "solver", "learner", "demos", "regen", "true_weights"});

  ExperimentConfig config;
  config.text = text;
  config.env = EnvironmentFromYaml(root["env"]);
  const int n = config.env->spec().num_agents;

  const YAML::Node solver = root["solver"];
  CheckKeys(solver, "solver",
            {"k_max", "lambda", "kappa", "vi_tol", "vi_max_iters"});
  Read(solver, "solver", "k_max", &config.solver.k_max);
  if (solver && solver["lambda"]) {
    try {
      if (solver["lambda"].IsSequence()) {
        config.solver.lambda = solver["lambda"].as<std::vector<double>>();
      } else {
        config.solver.lambda = {solver["lambda"].as<double>()};
      }
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("solver.lambda: ") + e.what());
    }
  }
  Read(solver, "solver", "kappa", &config.solver.kappa);
  Read(solver, "solver", "vi_tol", &config.solver.vi_tol);
  Read(solver, "solver", "vi_max_iters", &config.solver.vi_max_iters);
  config.solver.Validate(config.env->spec());

  const YAML::Node learner = root["learner"];
  CheckKeys(learner, "learner",
            {"algorithm", "eta", "l2", "max_epochs", "grad_tol", "leader",
             "include_level_zero", "init_low", "init_high"});
  std::string algorithm = AlgorithmName(config.learner.algorithm);
  Read(learner, "learner", "algorithm", &algorithm);
  config.learner.algorithm = ParseAlgorithm(algorithm);
  Read(learner, "learner", "eta", &config.learner.eta);
  Read(learner, "learner", "l2", &config.learner.l2);
  Read(learner, "learner", "max_epochs", &config.learner.max_epochs);
  Read(learner, "learner", "grad_tol", &config.learner.grad_tol);
  Read(learner, "learner", "leader", &config.learner.leader);
  Read(learner, "learner", "include_level_zero",
       &config.learner.include_level_zero);
  Read(learner, "learner", "init_low", &config.learner.init_low);
  Read(learner, "learner", "init_high", &config.learner.init_high);
  config.learner.Validate();

  const YAML::Node demos = root["demos"];
  CheckKeys(demos, "demos",
            {"count", "max_steps", "levels", "min_length", "train", "test"});
  Read(demos, "demos", "count", &config.demos.count);
  Read(demos, "demos", "max_steps", &config.demos.max_steps);
  Read(demos, "demos", "min_length", &config.demos.min_length);
  Read(demos, "demos", "train", &config.train_count);
  Read(demos, "demos", "test", &config.test_count);
  if (demos && demos["levels"]) {
    const YAML::Node levels = demos["levels"];
    if (levels.IsScalar() && levels.as<std::string>() == "random") {
      config.demos.assignment = LevelAssignment::kRandom;
    } else if (levels.IsSequence()) {
      config.demos.assignment = LevelAssignment::kFixed;
      config.demos.fixed_levels = levels.as<std::vector<int>>();
      if (static_cast<int>(config.demos.fixed_levels.size()) != n) {
        throw ConfigError("demos.levels needs one level per agent");
      }
    } else {
      throw ConfigError("demos.levels must be `random` or a list of levels");
    }
  }

  const YAML::Node regen = root["regen"];
  CheckKeys(regen, "regen", {"mode"});
  std::string mode = RegenModeName(config.regen_mode);
  Read(regen, "regen", "mode", &mode);
  config.regen_mode = ParseRegenMode(mode);

  if (root["true_weights"]) {
    std::vector<std::vector<double>> blocks;
    try {
      blocks = root["true_weights"].as<std::vector<std::vector<double>>>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("true_weights: ") + e.what());
    }
    try {
      RewardModel::FromBlocks(config.env->spec(), blocks);
    } catch (const Error& e) {
      throw ConfigError(std::string("true_weights: ") + e.what());
    }
    config.true_weights = blocks;
  }
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str());
}

}  // namespace qlk_irl
