#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "osiris/mdp.hpp"

namespace osiris {

// Deterministic gridworld described by a small layout document.
//
// Cells are [row, col] with row 0 at the top; actions are N=0, E=1, S=2,
// W=3. A cell is free iff it carries an arrow (non-terminal free cells) or
// is a terminal; every other cell is a wall. Moves into walls or off the
// grid stay in place. Entering a terminal cell ends the episode and pays
// that cell's reward, booked as r(s, a) of the step that enters it.
//
// Policies are epsilon-greedy around the arrows: probability eps/4 on each
// action plus 1 - eps on the arrow action. eps_behavior_corridor, when set,
// replaces eps_behavior inside corridor cells only.
struct GridworldConfig {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::array<int, 2> start{0, 0};
  std::vector<std::array<int, 2>> corridor;
  std::vector<std::pair<std::array<int, 2>, int>> arrows;       // cell -> action
  std::vector<std::pair<std::array<int, 2>, double>> terminals; // cell -> entry reward
  double eps_eval = 0.1;
  double eps_behavior = 0.5;
  std::optional<double> eps_behavior_corridor;
  double express_corridor_eps = 0.2;  // value canonical_express() installs
  double gamma = 1.0;
  int t_max = 1000;
};

struct GridworldModel {
  GridworldConfig config;
  MdpSpec mdp;
  PolicySpec pi_e;
  PolicySpec pi_b;
  std::vector<std::array<int, 2>> cell_of_state;  // state id -> [row, col]
  std::vector<int> state_of_cell;                 // row * cols + col -> state id, -1 for walls
  std::vector<std::uint8_t> is_corridor;          // per state id
  int start_state = 0;

  int state_at(int row, int col) const { return state_of_cell[static_cast<std::size_t>(row) * config.cols + col]; }
};

// Validates the layout (cells in range, arrows only on free non-terminal
// cells, start is a free cell, corridor cells carry arrows) and builds the
// MDP plus both epsilon-greedy policies. State ids enumerate free cells in
// row-major order.
GridworldModel build_gridworld(const GridworldConfig& cfg);

GridworldConfig parse_gridworld_config(const std::string& json_text);
std::string gridworld_config_to_json(const GridworldConfig& cfg);

// The layout shipped with the library, behavior policy exploring everywhere
// at eps_behavior.
GridworldModel canonical_dilly_dallying();
// Same layout with the behavior policy's corridor exploration tightened to
// express_corridor_eps.
GridworldModel canonical_express();

}  // namespace osiris
