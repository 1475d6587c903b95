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

#include "qlk_irl/envs/pacman.h"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <sstream>

#include "qlk_irl/error.h"

namespace qlk_irl {
namespace {

constexpr int kDx[PacmanEnv::kNumActions] = {0, 0, -1, 1, 0};
constexpr int kDy[PacmanEnv::kNumActions] = {-1, 1, 0, 0, 0};
constexpr const char* kActionNames[PacmanEnv::kNumActions] = {
    "up", "down", "left", "right", "stay"};

std::vector<std::string> MazeRows(const std::string& maze) {
  std::vector<std::string> rows;
  std::istringstream in(maze);
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    rows.push_back(line.substr(begin, end - begin + 1));
  }
  return rows;
}

}  // namespace

PacmanConfig DefaultPacmanConfig() {
  PacmanConfig config;
  config.maze =
      "P.o..\n"
      ".....\n"
      ".....\n"
      "..o.G\n";
  return config;
}

PacmanEnv::PacmanEnv(const PacmanConfig& config) {
  const auto rows = MazeRows(config.maze);
  if (rows.empty()) throw ConfigError("maze is empty");
  height_ = static_cast<int>(rows.size());
  width_ = static_cast<int>(rows[0].size());
  cell_index_.assign(width_ * height_, -1);
  int pac = -1;
  int ghost = -1;
  for (int y = 0; y < height_; ++y) {
    if (static_cast<int>(rows[y].size()) != width_) {
      throw ConfigError("maze rows must all have the same width");
    }
    for (int x = 0; x < width_; ++x) {
      const char c = rows[y][x];
      if (c == '#') continue;
      if (c != '.' && c != 'o' && c != 'P' && c != 'G') {
        throw ConfigError(std::string("unknown maze character '") + c + "'");
      }
      const int cell = static_cast<int>(cells_.size());
      cell_index_[y * width_ + x] = cell;
      cells_.emplace_back(x, y);
      if (c == 'o') dot_cells_.push_back(cell);
      if (c == 'P') {
        if (pac >= 0) throw ConfigError("maze has more than one 'P' spawn");
        pac = cell;
      }
      if (c == 'G') {
        if (ghost >= 0) throw ConfigError("maze has more than one 'G' spawn");
        ghost = cell;
      }
    }
  }
  if (pac < 0 || ghost < 0) {
    throw ConfigError("maze needs one 'P' and one 'G' spawn");
  }
  if (dot_cells_.empty()) throw ConfigError("maze has no dots");
  if (num_dots() > kMaxDots) {
    throw ConfigError("maze has " + std::to_string(num_dots()) +
                      " dots; at most " + std::to_string(kMaxDots) +
                      " keep the state space tabular");
  }
  pac_spawn_ = pac;
  ghost_spawn_ = ghost;

  // All-pairs maze distances by BFS from every cell.
  const int n = num_cells();
  maze_distance_.assign(n * n, -1);
  for (int source = 0; source < n; ++source) {
    std::queue<int> frontier;
    frontier.push(source);
    maze_distance_[source * n + source] = 0;
    while (!frontier.empty()) {
      const int cell = frontier.front();
      frontier.pop();
      for (int a = 0; a < kStay; ++a) {
        const int next = Move(cell, a);
        if (maze_distance_[source * n + next] < 0) {
          maze_distance_[source * n + next] =
              maze_distance_[source * n + cell] + 1;
          frontier.push(next);
        }
      }
    }
  }
  for (int dot : dot_cells_) {
    if (maze_distance_[pac_spawn_ * n + dot] < 0) {
      throw ConfigError("a dot is unreachable from the pac-man spawn");
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      max_distance_ = std::max(
          max_distance_, std::abs(cells_[a].first - cells_[b].first) +
                             std::abs(cells_[a].second - cells_[b].second));
    }
  }
  Build(config.discount);
}

int PacmanEnv::CellAt(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return -1;
  return cell_index_[y * width_ + x];
}

int PacmanEnv::Move(int cell, int action) const {
  const auto [x, y] = cells_[cell];
  const int next = CellAt(x + kDx[action], y + kDy[action]);
  return next < 0 ? cell : next;
}

int PacmanEnv::NearestDot(int cell, unsigned bits) const {
  const int n = num_cells();
  int best = -1;
  for (int j = 0; j < num_dots(); ++j) {
    if (!(bits & (1u << j))) continue;
    const int distance = maze_distance_[cell * n + dot_cells_[j]];
    if (distance >= 0 && (best < 0 || distance < best)) best = distance;
  }
  return best;
}

int PacmanEnv::Encode(const PacmanState& state) const {
  const int pac = CellAt(state.pac_x, state.pac_y);
  const int ghost = CellAt(state.ghost_x, state.ghost_y);
  if (pac < 0 || ghost < 0) {
    throw InputError("pac-man state places an agent outside free cells");
  }
  if (static_cast<int>(state.dots.size()) != num_dots()) {
    throw InputError("pac-man state has the wrong number of dot flags");
  }
  unsigned bits = 0;
  for (int j = 0; j < num_dots(); ++j) {
    if (state.dots[j]) bits |= 1u << j;
  }
  return (pac * num_cells() + ghost) * (1 << num_dots()) +
         static_cast<int>(bits);
}

PacmanState PacmanEnv::Decode(int index) const {
  if (index < 0 || index >= spec_.num_states) {
    throw InputError("pac-man state index " + std::to_string(index) +
                     " out of range");
  }
  const int dot_states = 1 << num_dots();
  const unsigned bits = static_cast<unsigned>(index % dot_states);
  const int cells = index / dot_states;
  const int ghost = cells % num_cells();
  const int pac = cells / num_cells();
  PacmanState state;
  state.pac_x = cells_[pac].first;
  state.pac_y = cells_[pac].second;
  state.ghost_x = cells_[ghost].first;
  state.ghost_y = cells_[ghost].second;
  state.dots.resize(num_dots());
  for (int j = 0; j < num_dots(); ++j) state.dots[j] = (bits >> j) & 1u;
  return state;
}

int PacmanEnv::SpawnState() const {
  const int dot_states = 1 << num_dots();
  return (pac_spawn_ * num_cells() + ghost_spawn_) * dot_states +
         (dot_states - 1);
}

void PacmanEnv::Build(double discount) {
  const int n = num_cells();
  const int dot_states = 1 << num_dots();
  spec_.num_agents = 2;
  spec_.num_states = n * n * dot_states;
  spec_.action_counts = {kNumActions, kNumActions};
  spec_.feature_dims = {kNumFeatures, kNumFeatures};
  spec_.stationary_actions = {kStay, kStay};
  spec_.discount = discount;
  const int joint = kNumActions * kNumActions;
  spec_.successor.assign(static_cast<std::size_t>(spec_.num_states) * joint,
                         0);
  spec_.terminal.assign(spec_.num_states, 0);
  spec_.features.assign(2, std::vector<double>(
                               static_cast<std::size_t>(spec_.num_states) *
                                   kNumFeatures,
                               0.0));

  for (int s = 0; s < spec_.num_states; ++s) {
    const unsigned bits = static_cast<unsigned>(s % dot_states);
    const int ghost = (s / dot_states) % n;
    const int pac = s / dot_states / n;
    const bool terminal = pac == ghost || bits == 0;
    spec_.terminal[s] = terminal ? 1 : 0;
    for (int j = 0; j < joint; ++j) {
      int next = s;
      if (!terminal) {
        const int pac_next = Move(pac, j / kNumActions);
        const int ghost_next = Move(ghost, j % kNumActions);
        unsigned bits_next = bits;
        for (int d = 0; d < num_dots(); ++d) {
          if (dot_cells_[d] == pac_next) bits_next &= ~(1u << d);
        }
        next = (pac_next * n + ghost_next) * dot_states +
               static_cast<int>(bits_next);
      }
      spec_.successor[static_cast<std::size_t>(s) * joint + j] = next;
    }
    if (terminal) continue;

    const int d = std::abs(cells_[pac].first - cells_[ghost].first) +
                  std::abs(cells_[pac].second - cells_[ghost].second);
    const int remaining = std::popcount(bits);
    double* pac_phi = &spec_.features[0][s * kNumFeatures];
    double* ghost_phi = &spec_.features[1][s * kNumFeatures];
    pac_phi[0] = std::exp(static_cast<double>(d - max_distance_));
    pac_phi[1] = 1.0 / (1.0 + NearestDot(pac, bits));
    pac_phi[2] = 1.0 / std::max(remaining, 1);
    ghost_phi[0] = 1.0 / (1.0 + d);
    ghost_phi[1] = 1.0 / (1.0 + NearestDot(ghost, bits));
    ghost_phi[2] = static_cast<double>(remaining) / num_dots();
  }
  spec_.Validate();
}

std::vector<double> PacmanEnv::PhysicalState(int state) const {
  const PacmanState decoded = Decode(state);
  return {static_cast<double>(decoded.pac_x),
          static_cast<double>(decoded.pac_y),
          static_cast<double>(decoded.ghost_x),
          static_cast<double>(decoded.ghost_y)};
}

std::string PacmanEnv::ActionName(int agent, int action) const {
  if (agent < 0 || agent > 1 || action < 0 || action >= kNumActions) {
    throw InputError("pac-man action out of range");
  }
  return kActionNames[action];
}

std::string PacmanEnv::DescribeState(int state) const {
  const PacmanState decoded = Decode(state);
  std::ostringstream out;
  out << "pac=(" << decoded.pac_x << "," << decoded.pac_y << ") ghost=("
      << decoded.ghost_x << "," << decoded.ghost_y << ") dots=";
  for (bool valid : decoded.dots) out << (valid ? '1' : '0');
  return out.str();
}

}  // namespace qlk_irl
