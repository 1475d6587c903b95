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

// qlkirl: command-line entry point.
//
//   qlkirl [--seed N] [--workers N] [--out-dir DIR] <subcommand> [flags]
//
// Subcommands: gen-demos, learn, infer-levels, solve, regen, eval,
// gradcheck. Exit codes: 0 ok, 1 usage, 2 configuration, 3 numerical
// non-convergence, 4 validation failure.

#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlk_irl/config.h"
#include "qlk_irl/demo_data.h"
#include "qlk_irl/envs/driving.h"
#include "qlk_irl/envs/pacman.h"
#include "qlk_irl/error.h"
#include "qlk_irl/evaluation.h"
#include "qlk_irl/gradcheck.h"
#include "qlk_irl/learner.h"
#include "qlk_irl/level_inference.h"
#include "qlk_irl/solver.h"
#include "qlk_irl/trajectory_io.h"

namespace {

using json = nlohmann::json;
using namespace qlk_irl;

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
  std::vector<std::string> argv;
};

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string OutPath(const Globals& g, const std::string& name) {
  std::filesystem::path dir = g.out_dir.empty() ? "." : g.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  return (dir / name).string();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Records what produced the outputs. Contains no timestamps so identical
// inputs give identical manifests.
void WriteManifest(const Globals& g, const std::string& command,
                   const std::string& config_path,
                   const std::string& config_text,
                   const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "qlkirl";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = g.argv;
  m["seed"] = g.seed;
  m["workers"] = g.workers;
  m["config_path"] = config_path;
  m["config_sha256"] = Sha256Hex(config_text);
  m["outputs"] = outputs;
  m["libraries"] = {
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"cli11", CLI11_VERSION},
      {"openssl", OPENSSL_VERSION_TEXT},
      {"compiler", __VERSION__}};
  WriteText(OutPath(g, "manifest_" + command + ".json"), m.dump(2) + "\n");
}

// Accepts {"weights": [...]}, {"blocks": [[...], ...]} or a bare array.
std::vector<double> ReadWeights(const std::string& path, const GameSpec& spec) {
  json j;
  try {
    j = json::parse(ReadText(path));
  } catch (const json::exception& e) {
    throw ConfigError("weights file " + path + ": " + e.what());
  }
  std::vector<double> w;
  try {
    if (j.is_object() && j.contains("weights")) {
      w = j["weights"].get<std::vector<double>>();
    } else if (j.is_object() && j.contains("blocks")) {
      w = RewardModel::FromBlocks(
              spec, j["blocks"].get<std::vector<std::vector<double>>>())
              .weights();
    } else if (j.is_array()) {
      w = j.get<std::vector<double>>();
    } else {
      throw ConfigError("weights file " + path +
                        " needs a `weights` or `blocks` entry");
    }
  } catch (const json::exception& e) {
    throw ConfigError("weights file " + path + ": " + e.what());
  }
  RewardModel(spec, w);  // validates size and sign
  return w;
}

std::vector<double> WeightsOrTruth(const std::string& path,
                                   const ExperimentConfig& config) {
  const GameSpec& spec = config.env->spec();
  if (!path.empty()) return ReadWeights(path, spec);
  if (!config.true_weights) {
    throw ConfigError("no --weights given and the config has no true_weights");
  }
  return RewardModel::FromBlocks(spec, *config.true_weights).weights();
}

json WeightsJson(const std::vector<double>& w, const GameSpec& spec) {
  json j;
  j["weights"] = w;
  j["blocks"] = RewardModel(spec, w).Blocks();
  return j;
}

std::vector<int> ParseLevelList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad level list '" + text + "'");
    }
  }
  return out;
}

Dataset LoadDemos(const std::string& path, const GameSpec& spec) {
  Dataset d = LoadDataset(path);
  for (std::size_t i = 0; i < d.size(); ++i) {
    try {
      CheckTrajectory(spec, d[i]);
    } catch (const Error& e) {
      throw InputError(path + ": trajectory " + std::to_string(i) + ": " +
                       e.what());
    }
  }
  return d;
}

// Flags shared by the subcommands that read a config.
struct CommonFlags {
  std::string config;
  CLI::Option* k_max = nullptr;
  int k_max_value = 0;
  CLI::Option* kappa = nullptr;
  double kappa_value = 0.0;
  CLI::Option* lambda = nullptr;
  std::vector<double> lambda_value;
  CLI::Option* vi_tol = nullptr;
  double vi_tol_value = 0.0;

  void Add(CLI::App* app, bool config_required = true) {
    auto* c = app->add_option("--config", config, "YAML experiment config");
    if (config_required) c->required();
    c->check(CLI::ExistingFile);
    k_max = app->add_option("--k-max", k_max_value, "highest level");
    kappa = app->add_option("--kappa", kappa_value, "smooth-max exponent");
    lambda = app->add_option("--lambda", lambda_value,
                             "rationality coefficient(s)");
    vi_tol = app->add_option("--vi-tol", vi_tol_value,
                             "value iteration tolerance");
  }

  ExperimentConfig Load(const Globals& g) const {
    ExperimentConfig c = LoadExperimentConfig(config);
    if (k_max->count()) c.solver.k_max = k_max_value;
    if (kappa->count()) c.solver.kappa = kappa_value;
    if (lambda->count()) c.solver.lambda = lambda_value;
    if (vi_tol->count()) c.solver.vi_tol = vi_tol_value;
    c.solver.workers = g.workers;
    c.learner.workers = g.workers;
    c.learner.seed = g.seed;
    c.demos.workers = g.workers;
    c.demos.seed = g.seed;
    c.solver.Validate(c.env->spec());
    return c;
  }
};

// ---------------------------------------------------------------- gen-demos

struct GenDemosFlags {
  CommonFlags common;
  int count = 0;
  CLI::Option* count_opt = nullptr;
  std::string levels;
  int max_steps = 0;
  CLI::Option* max_steps_opt = nullptr;
  int min_length = 0;
  CLI::Option* min_length_opt = nullptr;
  std::string weights;
  int train = -1;
  CLI::Option* train_opt = nullptr;
  int test = 0;
  CLI::Option* test_opt = nullptr;
};

void RunGenDemos(const Globals& g, const GenDemosFlags& f) {
  ExperimentConfig c = f.common.Load(g);
  if (f.count_opt->count()) c.demos.count = f.count;
  if (f.max_steps_opt->count()) c.demos.max_steps = f.max_steps;
  if (f.min_length_opt->count()) c.demos.min_length = f.min_length;
  if (!f.levels.empty()) {
    if (f.levels == "random") {
      c.demos.assignment = LevelAssignment::kRandom;
    } else {
      c.demos.assignment = LevelAssignment::kFixed;
      c.demos.fixed_levels = ParseLevelList(f.levels);
    }
  }
  if (f.train_opt->count()) c.train_count = f.train;
  if (f.test_opt->count()) c.test_count = f.test;
  const auto& spec = c.env->spec();
  const RewardModel truth(spec, WeightsOrTruth(f.weights, c));
  const Dataset demos = GenerateDemos(*c.env, truth, c.solver, c.demos);

  std::vector<std::string> outputs;
  const std::string path = OutPath(g, "demos.jsonl");
  SaveDataset(path, demos);
  outputs.push_back(path);
  if (c.test_count > 0 || c.train_count >= 0) {
    const int train = c.train_count >= 0
                          ? c.train_count
                          : static_cast<int>(demos.size()) - c.test_count;
    std::vector<std::string> warnings;
    auto [tr, te] = Split(demos, train, c.test_count, g.seed, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    outputs.push_back(OutPath(g, "train.jsonl"));
    SaveDataset(outputs.back(), tr);
    outputs.push_back(OutPath(g, "test.jsonl"));
    SaveDataset(outputs.back(), te);
  }
  std::cout << "wrote " << demos.size() << " demonstrations to " << path
            << "\n";
  WriteManifest(g, "gen-demos", f.common.config, c.text, outputs);
}

// -------------------------------------------------------------------- learn

struct LearnFlags {
  CommonFlags common;
  std::string demos;
  std::string algo;
  double eta = 0.0;
  CLI::Option* eta_opt = nullptr;
  double l2 = 0.0;
  CLI::Option* l2_opt = nullptr;
  int max_epochs = 0;
  CLI::Option* max_epochs_opt = nullptr;
  double grad_tol = 0.0;
  CLI::Option* grad_tol_opt = nullptr;
  int leader = -1;
  CLI::Option* leader_opt = nullptr;
  bool include_level_zero = false;
  std::string weights_out = "weights.json";
  std::string record_out = "learn_record.csv";
};

void RunLearn(const Globals& g, const LearnFlags& f) {
  ExperimentConfig c = f.common.Load(g);
  if (!f.algo.empty()) c.learner.algorithm = ParseAlgorithm(f.algo);
  if (f.eta_opt->count()) c.learner.eta = f.eta;
  if (f.l2_opt->count()) c.learner.l2 = f.l2;
  if (f.max_epochs_opt->count()) c.learner.max_epochs = f.max_epochs;
  if (f.grad_tol_opt->count()) c.learner.grad_tol = f.grad_tol;
  if (f.leader_opt->count()) c.learner.leader = f.leader;
  if (f.include_level_zero) c.learner.include_level_zero = true;
  c.learner.Validate();
  const auto& spec = c.env->spec();
  const Dataset demos = LoadDemos(f.demos, spec);
  const LearnResult result = Learn(demos, spec, c.learner, c.solver);

  json out = WeightsJson(result.model.weights(), spec);
  out["algorithm"] = AlgorithmName(c.learner.algorithm);
  out["converged"] = result.converged;
  out["epochs"] = result.records.size();
  out["eta_halvings"] = result.halvings;
  out["final_loglik"] = result.records.back().loglik;
  out["final_objective"] = result.records.back().objective;
  const std::string wpath = OutPath(g, f.weights_out);
  const std::string rpath = OutPath(g, f.record_out);
  WriteText(wpath, out.dump(2) + "\n");
  WriteText(rpath, LearnRecordCsv(result.records));
  std::cout << AlgorithmName(c.learner.algorithm) << ": "
            << result.records.size() << " epochs, loglik "
            << result.records.back().loglik << ", gradnorm "
            << result.records.back().grad_norm
            << (result.converged ? " (converged)" : "") << "\n";
  WriteManifest(g, "learn", f.common.config, c.text, {wpath, rpath});
}

// ------------------------------------------------------------- infer-levels

struct InferFlags {
  CommonFlags common;
  std::string demos;
  std::string weights;
  bool include_level_zero = false;
  std::string out = "levels.csv";
};

void RunInferLevels(const Globals& g, const InferFlags& f) {
  ExperimentConfig c = f.common.Load(g);
  const auto& spec = c.env->spec();
  const Dataset demos = LoadDemos(f.demos, spec);
  const RewardModel model(spec, WeightsOrTruth(f.weights, c));
  SolverConfig sc = c.solver;
  sc.compute_gradients = false;
  const LevelPolicySet policies = SolveAll(spec, model, sc);
  const auto levels = MakeLevelSet(
      sc.k_max, f.include_level_zero || c.learner.include_level_zero);
  std::ostringstream csv;
  csv.precision(17);
  csv << "traj_id,t,agent,k,prob\n";
  for (std::size_t d = 0; d < demos.size(); ++d) {
    std::vector<LevelPosterior> history;
    InferTrajectory(demos[d], policies, levels, false, &history);
    for (const auto& post : history) {
      for (int i = 0; i < post.num_agents(); ++i) {
        for (int k = 0; k < post.num_levels(); ++k) {
          csv << d << "," << post.t << "," << i << "," << post.levels[k]
              << "," << post.probs[i][k] << "\n";
        }
      }
    }
  }
  const std::string path = OutPath(g, f.out);
  WriteText(path, csv.str());
  std::cout << "wrote level posteriors for " << demos.size()
            << " trajectories to " << path << "\n";
  WriteManifest(g, "infer-levels", f.common.config, c.text, {path});
}

// -------------------------------------------------------------------- solve

struct SolveFlags {
  CommonFlags common;
  std::string weights;
  bool gradients = false;
  std::string out = "policies.json";
};

void RunSolve(const Globals& g, const SolveFlags& f) {
  ExperimentConfig c = f.common.Load(g);
  const auto& spec = c.env->spec();
  const auto w = WeightsOrTruth(f.weights, c);
  SolverConfig sc = c.solver;
  sc.compute_gradients = f.gradients;
  const LevelPolicySet policies = SolveAll(spec, RewardModel(spec, w), sc);
  json out;
  out["env"] = c.env->id();
  out["num_states"] = spec.num_states;
  out["weights"] = w;
  out["kappa"] = sc.kappa;
  out["k_max"] = sc.k_max;
  json tables = json::array();
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int k = 0; k <= sc.k_max; ++k) {
      const LevelTable& t = policies.Get(i, k);
      json entry = {{"agent", i},
                    {"level", k},
                    {"lambda", t.lambda},
                    {"num_actions", t.num_actions},
                    {"q_iterations", t.stats.q_iterations},
                    {"q", t.q},
                    {"policy", t.policy}};
      if (f.gradients) {
        entry["num_params"] = t.num_params;
        entry["q_grad"] = t.q_grad;
        entry["policy_grad"] = t.policy_grad;
      }
      tables.push_back(std::move(entry));
    }
  }
  out["tables"] = std::move(tables);
  const std::string path = OutPath(g, f.out);
  WriteText(path, out.dump() + "\n");
  std::cout << "wrote " << spec.num_agents * (sc.k_max + 1) << " tables to "
            << path << "\n";
  WriteManifest(g, "solve", f.common.config, c.text, {path});
}

// -------------------------------------------------------------------- regen

struct RegenFlags {
  CommonFlags common;
  std::string test;
  std::string train;
  std::string weights;
  std::string algo;
  std::string mode;
  int leader = -1;
  CLI::Option* leader_opt = nullptr;
  std::string out = "regenerated.jsonl";
  std::string report = "regen_report.json";
};

void RunRegen(const Globals& g, const RegenFlags& f) {
  ExperimentConfig c = f.common.Load(g);
  if (!f.algo.empty()) c.learner.algorithm = ParseAlgorithm(f.algo);
  if (!f.mode.empty()) c.regen_mode = ParseRegenMode(f.mode);
  if (f.leader_opt->count()) c.learner.leader = f.leader;
  const auto& spec = c.env->spec();
  const Dataset test = LoadDemos(f.test, spec);
  const RewardModel model(spec, WeightsOrTruth(f.weights, c));
  SolverConfig sc = c.solver;
  sc.compute_gradients = false;

  LevelPolicySet policies;
  std::vector<int> levels;
  std::vector<std::vector<double>> prior;
  if (c.learner.algorithm != Algorithm::kLeaderFollower) {
    if (c.learner.algorithm == Algorithm::kPr2) sc.k_max = 1;
    policies = SolveAll(spec, model, sc);
    levels = MakeLevelSet(sc.k_max, c.learner.include_level_zero);
    if (c.learner.algorithm == Algorithm::kCognitionAware &&
        c.regen_mode == RegenMode::kPriorMarginal) {
      if (f.train.empty()) {
        throw UsageError("--mode prior-marginal needs --train");
      }
      prior = LevelFrequencies(LoadDemos(f.train, spec), policies, levels);
    }
  }

  Dataset generated;
  json report = json::array();
  const auto* driving = dynamic_cast<const DrivingEnv*>(c.env.get());
  for (std::size_t d = 0; d < test.size(); ++d) {
    std::seed_seq seq{static_cast<std::uint64_t>(g.seed >> 32),
                      static_cast<std::uint64_t>(g.seed & 0xffffffffu),
                      static_cast<std::uint64_t>(d)};
    std::mt19937_64 rng(seq);
    const std::uint64_t seed = rng();
    Regenerated r;
    switch (c.learner.algorithm) {
      case Algorithm::kCognitionAware:
        r = RegenerateQlk(*c.env, test[d], policies, levels, c.regen_mode,
                          prior, seed);
        break;
      case Algorithm::kPr2:
        r = RegeneratePr2(*c.env, test[d], policies, seed);
        break;
      case Algorithm::kLeaderFollower:
        r = RegenerateLf(*c.env, test[d], model, c.solver, c.learner.leader,
                         seed);
        break;
    }
    const auto dist = TrajectoryScore(*c.env, r.trajectory, test[d]);
    json entry = {{"traj_id", d},
                  {"traj_score", dist.score},
                  {"length_mismatch", dist.length_mismatch},
                  {"generated_length", r.trajectory.size()},
                  {"test_length", test[d].size()}};
    if (!r.levels.empty()) entry["levels"] = r.levels;
    if (driving) {
      entry["generated_upper_yields"] = UpperCarYields(*driving, r.trajectory);
      entry["test_upper_yields"] = UpperCarYields(*driving, test[d]);
    }
    report.push_back(std::move(entry));
    generated.push_back(std::move(r.trajectory));
  }
  const std::string path = OutPath(g, f.out);
  const std::string rpath = OutPath(g, f.report);
  SaveDataset(path, generated);
  json rep = {{"algorithm", AlgorithmName(c.learner.algorithm)},
              {"trajectories", report}};
  if (c.learner.algorithm == Algorithm::kCognitionAware) {
    rep["mode"] = RegenModeName(c.regen_mode);
  }
  WriteText(rpath, rep.dump(2) + "\n");
  std::cout << "regenerated " << generated.size() << " trajectories to "
            << path << "\n";
  WriteManifest(g, "regen", f.common.config, c.text, {path, rpath});
}

// --------------------------------------------------------------------- eval

struct EvalFlags {
  CommonFlags common;
  std::string generated;
  std::string test;
  std::string weights;
  std::string demos;
  std::vector<std::string> metrics;
  std::string out = "eval.csv";
};

void RunEval(const Globals& g, const EvalFlags& f) {
  ExperimentConfig c = f.common.Load(g);
  const auto& spec = c.env->spec();
  const bool is_driving =
      dynamic_cast<const DrivingEnv*>(c.env.get()) != nullptr;
  std::vector<std::string> metrics = f.metrics;
  if (metrics.empty()) {
    if (!f.generated.empty()) {
      metrics.push_back("traj_score");
      if (is_driving) metrics.push_back("decision_score");
    }
    if (!f.weights.empty() && c.true_weights) {
      metrics.push_back("pcc");
      metrics.push_back("scc");
    }
    if (!f.demos.empty()) {
      if (!f.weights.empty()) metrics.push_back("loglik");
      if (c.true_weights) metrics.push_back("ground_truth_loglik");
    }
    if (metrics.empty()) {
      throw UsageError("nothing to evaluate: pass --generated/--test, "
                       "--weights or --demos");
    }
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "metric,value\n";
  for (const auto& metric : metrics) {
    double value = 0.0;
    if (metric == "traj_score" || metric == "decision_score") {
      if (f.generated.empty() || f.test.empty()) {
        throw UsageError(metric + " needs --generated and --test");
      }
      const Dataset gen = LoadDemos(f.generated, spec);
      const Dataset test = LoadDemos(f.test, spec);
      value = metric == "traj_score" ? MeanTrajectoryScore(*c.env, gen, test)
                                     : DecisionScore(*c.env, gen, test);
    } else if (metric == "pcc" || metric == "scc") {
      if (f.weights.empty() || !c.true_weights) {
        throw UsageError(metric + " needs --weights and true_weights");
      }
      const auto learned = ReadWeights(f.weights, spec);
      const auto truth =
          RewardModel::FromBlocks(spec, *c.true_weights).weights();
      value = metric == "pcc" ? Pcc(learned, truth) : Scc(learned, truth);
    } else if (metric == "loglik" || metric == "ground_truth_loglik") {
      if (f.demos.empty()) throw UsageError(metric + " needs --demos");
      const Dataset demos = LoadDemos(f.demos, spec);
      SolverConfig sc = c.solver;
      sc.compute_gradients = false;
      if (metric == "loglik") {
        if (f.weights.empty()) throw UsageError("loglik needs --weights");
        const auto w = ReadWeights(f.weights, spec);
        LearnerConfig lc = c.learner;
        value = ObjectiveAndGradient(demos, spec, w, sc, lc, false).loglik;
      } else {
        if (!c.true_weights) {
          throw UsageError("ground_truth_loglik needs true_weights");
        }
        const RewardModel truth =
            RewardModel::FromBlocks(spec, *c.true_weights);
        int k_max = sc.k_max;
        for (const auto& d : demos) {
          if (d.gt_levels) {
            for (int k : *d.gt_levels) k_max = std::max(k_max, k);
          }
        }
        sc.k_max = k_max;
        value = GroundTruthLogLik(demos, SolveAll(spec, truth, sc));
      }
    } else {
      throw UsageError("unknown metric '" + metric + "'");
    }
    csv << metric << "," << value << "\n";
    std::cout << metric << " = " << value << "\n";
  }
  const std::string path = OutPath(g, f.out);
  WriteText(path, csv.str());
  WriteManifest(g, "eval", f.common.config, c.text, {path});
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckFlags {
  CommonFlags common;
  double tol = 1e-3;
  double step = 1e-5;
  int draws = 3;
  int demos = 2;
};

void RunGradcheck(const Globals& g, const GradcheckFlags& f) {
  std::shared_ptr<Environment> env;
  SolverConfig sc;
  LearnerConfig lc;
  std::string text;
  if (!f.common.config.empty()) {
    ExperimentConfig c = f.common.Load(g);
    env = c.env;
    sc = c.solver;
    lc = c.learner;
    text = c.text;
  } else {
    env = std::make_shared<PacmanEnv>(DefaultPacmanConfig());
    if (f.common.k_max->count()) sc.k_max = f.common.k_max_value;
    if (f.common.kappa->count()) sc.kappa = f.common.kappa_value;
    if (f.common.lambda->count()) sc.lambda = f.common.lambda_value;
    sc.Validate(env->spec());
  }
  sc.vi_tol = f.common.vi_tol->count() ? f.common.vi_tol_value : 1e-12;
  sc.workers = g.workers;
  lc.workers = g.workers;
  if (lc.algorithm == Algorithm::kLeaderFollower) {
    lc.algorithm = Algorithm::kCognitionAware;
  }
  const auto& spec = env->spec();
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  bool ok = true;
  for (int draw = 0; draw < f.draws; ++draw) {
    std::vector<double> w(spec.NumParams());
    for (double& x : w) x = u(rng);
    const auto solver_err = CheckSolverGradient(spec, w, sc, f.step, rng());
    DemoConfig dc;
    dc.count = f.demos;
    dc.seed = rng();
    dc.max_steps = 20;
    const Dataset demos = GenerateDemos(*env, RewardModel(spec, w), sc, dc);
    const double obj_err =
        CheckObjectiveGradient(demos, spec, w, sc, lc, f.step, rng());
    const bool pass = solver_err.q <= f.tol && solver_err.policy <= f.tol &&
                      obj_err <= f.tol;
    ok = ok && pass;
    std::printf("draw %d: dQ rel err %.3e, dpi rel err %.3e, "
                "objective rel err %.3e  %s\n",
                draw, solver_err.q, solver_err.policy, obj_err,
                pass ? "ok" : "FAIL");
  }
  WriteManifest(g, "gradcheck", f.common.config, text, {});
  if (!ok) {
    throw InputError("gradient check exceeded tolerance " +
                     std::to_string(f.tol));
  }
  std::printf("gradient check passed (tol %.1e)\n", f.tol);
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  if (const char* dir = std::getenv("QLKIRL_OUT_DIR")) g.out_dir = dir;

  CLI::App app{"Quantal level-k inverse reinforcement learning"};
  app.set_version_flag("--version", kVersion);
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir,
                 "output directory (default: $QLKIRL_OUT_DIR or .)");
  app.require_subcommand(1);

  GenDemosFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-demos", "generate demonstrations");
  gen.common.Add(gen_cmd);
  gen.count_opt = gen_cmd->add_option("--count", gen.count, "demonstrations");
  gen_cmd->add_option("--levels", gen.levels,
                      "'random' or per-agent list such as 1,2");
  gen.max_steps_opt =
      gen_cmd->add_option("--max-steps", gen.max_steps, "rollout cap");
  gen.min_length_opt = gen_cmd->add_option(
      "--min-length", gen.min_length, "redraw rollouts shorter than this");
  gen_cmd->add_option("--weights", gen.weights,
                      "generating weights (default: config true_weights)");
  gen.train_opt = gen_cmd->add_option("--train", gen.train, "train split size");
  gen.test_opt = gen_cmd->add_option("--test", gen.test, "test split size");

  LearnFlags learn;
  auto* learn_cmd = app.add_subcommand("learn", "learn reward weights");
  learn.common.Add(learn_cmd);
  learn_cmd->add_option("--demos", learn.demos, "demonstration file")
      ->required()
      ->check(CLI::ExistingFile);
  learn_cmd->add_option("--algo", learn.algo,
                        "cognition-aware | pr2 | leader-follower");
  learn.eta_opt = learn_cmd->add_option("--eta", learn.eta, "learning rate");
  learn.l2_opt = learn_cmd->add_option("--l2", learn.l2, "L2 coefficient");
  learn.max_epochs_opt =
      learn_cmd->add_option("--max-epochs", learn.max_epochs, "epoch cap");
  learn.grad_tol_opt = learn_cmd->add_option("--grad-tol", learn.grad_tol,
                                             "gradient-norm threshold");
  learn.leader_opt = learn_cmd->add_option(
      "--leader", learn.leader, "leader agent for leader-follower");
  learn_cmd->add_flag("--include-level-zero", learn.include_level_zero,
                      "infer over level 0 too");
  learn_cmd->add_option("--weights-out", learn.weights_out,
                        "weights file name")->capture_default_str();
  learn_cmd->add_option("--record-out", learn.record_out,
                        "learning-record CSV name")->capture_default_str();

  InferFlags infer;
  auto* infer_cmd =
      app.add_subcommand("infer-levels", "level posteriors along demos");
  infer.common.Add(infer_cmd);
  infer_cmd->add_option("--demos", infer.demos, "demonstration file")
      ->required()
      ->check(CLI::ExistingFile);
  infer_cmd->add_option("--weights", infer.weights, "weights JSON")
      ->check(CLI::ExistingFile);
  infer_cmd->add_flag("--include-level-zero", infer.include_level_zero,
                      "infer over level 0 too");
  infer_cmd->add_option("--out", infer.out, "CSV name")->capture_default_str();

  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "dump ql-k policy tables");
  solve.common.Add(solve_cmd);
  solve_cmd->add_option("--weights", solve.weights, "weights JSON")
      ->check(CLI::ExistingFile);
  solve_cmd->add_flag("--gradients", solve.gradients,
                      "include weight gradients");
  solve_cmd->add_option("--out", solve.out, "JSON name")->capture_default_str();

  RegenFlags regen;
  auto* regen_cmd =
      app.add_subcommand("regen", "regenerate test interactions");
  regen.common.Add(regen_cmd);
  regen_cmd->add_option("--test", regen.test, "test demonstrations")
      ->required()
      ->check(CLI::ExistingFile);
  regen_cmd->add_option("--train", regen.train,
                        "training demonstrations (prior-marginal mode)")
      ->check(CLI::ExistingFile);
  regen_cmd->add_option("--weights", regen.weights, "learned weights JSON")
      ->check(CLI::ExistingFile);
  regen_cmd->add_option("--algo", regen.algo,
                        "cognition-aware | pr2 | leader-follower");
  regen_cmd->add_option("--mode", regen.mode, "map | prior-marginal");
  regen.leader_opt =
      regen_cmd->add_option("--leader", regen.leader, "leader agent");
  regen_cmd->add_option("--out", regen.out, "JSONL name")
      ->capture_default_str();
  regen_cmd->add_option("--report", regen.report, "report JSON name")
      ->capture_default_str();

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "compute metrics");
  eval.common.Add(eval_cmd);
  eval_cmd->add_option("--generated", eval.generated, "regenerated JSONL")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", eval.test, "test JSONL")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--weights", eval.weights, "learned weights JSON")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--demos", eval.demos,
                       "demonstrations for log-likelihood metrics")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--metrics", eval.metrics,
                       "traj_score decision_score pcc scc loglik "
                       "ground_truth_loglik");
  eval_cmd->add_option("--out", eval.out, "CSV name")->capture_default_str();

  GradcheckFlags grad;
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "finite-difference check of solver and objective");
  grad.common.Add(grad_cmd, false);
  grad_cmd->add_option("--tol", grad.tol, "relative error tolerance")
      ->capture_default_str();
  grad_cmd->add_option("--step", grad.step, "difference step")
      ->capture_default_str();
  grad_cmd->add_option("--draws", grad.draws, "random weight draws")
      ->capture_default_str();
  grad_cmd->add_option("--demos", grad.demos, "demos for the objective")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return ExitCode(ErrorKind::kUsage);
  }

  try {
    if (*gen_cmd) RunGenDemos(g, gen);
    if (*learn_cmd) RunLearn(g, learn);
    if (*infer_cmd) RunInferLevels(g, infer);
    if (*solve_cmd) RunSolve(g, solve);
    if (*regen_cmd) RunRegen(g, regen);
    if (*eval_cmd) RunEval(g, eval);
    if (*grad_cmd) RunGradcheck(g, grad);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(ErrorKind::kValidation);
  }
  return 0;
}
