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

#ifndef QLK_IRL_ENVS_PACMAN_H_
#define QLK_IRL_ENVS_PACMAN_H_

#include <string>
#include <vector>

#include "qlk_irl/envs/environment.h"

namespace qlk_irl {

// Maze characters: '#' wall, '.' free, 'o' dot, 'P' pac-man spawn,
// 'G' ghost spawn. Rows are separated by newlines; surrounding whitespace on
// each row is ignored.
struct PacmanConfig {
  std::string maze;
  double discount = 0.95;
};

// Open 4x5 maze with two dots (1600 states).
PacmanConfig DefaultPacmanConfig();

enum PacmanAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };

struct PacmanState {
  int pac_x = 0;
  int pac_y = 0;
  int ghost_x = 0;
  int ghost_y = 0;
  std::vector<bool> dots;  // validity of each dot, in maze reading order

  bool operator==(const PacmanState&) const = default;
};

// Zero-sum chase on a grid maze. Agent 0 is pac-man, agent 1 the ghost.
//
// State index = (pac_cell * num_cells + ghost_cell) * 2^num_dots + dot_bits,
// cells numbered in reading order over free cells. A state is terminal when
// both agents share a cell or every dot is collected.
//
// Pac-man features: exp(d - d_max), 1 / (1 + l_pac), 1 / max(n_ud, 1).
// Ghost features:   1 / (1 + d),    1 / (1 + l_ghost), n_ud / n_d.
// d is the L1 distance between agents, l_* the maze distance from that agent
// to the nearest remaining dot, n_ud the number of remaining dots.
class PacmanEnv : public Environment {
 public:
  static constexpr int kMaxDots = 8;
  static constexpr int kNumActions = 5;
  static constexpr int kNumFeatures = 3;

  explicit PacmanEnv(const PacmanConfig& config);

  std::string id() const override { return "pacman"; }
  const GameSpec& spec() const override { return spec_; }
  double dt() const override { return 1.0; }
  std::vector<double> PhysicalState(int state) const override;
  std::string ActionName(int agent, int action) const override;
  std::string DescribeState(int state) const override;

  int Encode(const PacmanState& state) const;
  PacmanState Decode(int index) const;

  int width() const { return width_; }
  int height() const { return height_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_dots() const { return static_cast<int>(dot_cells_.size()); }
  int max_distance() const { return max_distance_; }
  // Initial state with both agents on their spawn cells and all dots valid.
  int SpawnState() const;

 private:
  int CellAt(int x, int y) const;  // -1 for walls and out-of-bounds
  int Move(int cell, int action) const;
  int NearestDot(int cell, unsigned bits) const;  // maze distance, -1 if none
  void Build(double discount);

  int width_ = 0;
  int height_ = 0;
  std::vector<std::pair<int, int>> cells_;  // (x, y)
  std::vector<int> cell_index_;             // y * width + x -> cell or -1
  std::vector<int> dot_cells_;
  std::vector<int> maze_distance_;  // cell * num_cells + cell
  int max_distance_ = 0;
  int pac_spawn_ = 0;
  int ghost_spawn_ = 0;
  GameSpec spec_;
};

}  // namespace qlk_irl

#endif  // QLK_IRL_ENVS_PACMAN_H_
