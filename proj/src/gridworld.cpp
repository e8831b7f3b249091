#include "osiris/gridworld.hpp"

#include <set>
#include <stdexcept>

#include "json_util.hpp"
#include "osiris/gridworld_asset.hpp"

namespace osiris {

namespace {

using detail::json;

constexpr int kActions = 4;
// N, E, S, W
constexpr int kDRow[kActions] = {-1, 0, 1, 0};
constexpr int kDCol[kActions] = {0, 1, 0, -1};

std::array<int, 2> parse_cell(const json& j, const std::string& path, int rows, int cols) {
  const auto& arr = detail::as_array(j, path);
  if (arr.size() != 2) detail::fail_at(path, "expected [row, col]");
  const int r = detail::as_int(arr[0], path + "[0]");
  const int c = detail::as_int(arr[1], path + "[1]");
  if (r < 0 || r >= rows || c < 0 || c >= cols) detail::fail_at(path, "cell outside the grid");
  return {r, c};
}

}  // namespace

GridworldConfig parse_gridworld_config(const std::string& json_text) {
  const json doc = detail::parse_document(json_text, "gridworld layout");
  const std::string root = "layout";
  detail::check_allowed_keys(doc, root,
                             {"name", "rows", "cols", "start", "corridor", "arrows", "terminals",
                              "eps_eval", "eps_behavior", "eps_behavior_corridor",
                              "express_corridor_eps", "gamma", "t_max"});
  GridworldConfig cfg;
  cfg.name = detail::as_string(detail::require_field(doc, root, "name"), root + ".name");
  cfg.rows = detail::as_int(detail::require_field(doc, root, "rows"), root + ".rows");
  cfg.cols = detail::as_int(detail::require_field(doc, root, "cols"), root + ".cols");
  if (cfg.rows < 1 || cfg.cols < 1) detail::fail_at(root, "rows and cols must be positive");
  cfg.start = parse_cell(detail::require_field(doc, root, "start"), root + ".start", cfg.rows,
                         cfg.cols);
  const auto& corridor = detail::as_array(detail::require_field(doc, root, "corridor"),
                                          root + ".corridor");
  for (std::size_t i = 0; i < corridor.size(); ++i) {
    cfg.corridor.push_back(parse_cell(corridor[i], root + ".corridor[" + std::to_string(i) + "]",
                                      cfg.rows, cfg.cols));
  }
  const auto& arrows = detail::as_array(detail::require_field(doc, root, "arrows"),
                                        root + ".arrows");
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const std::string path = root + ".arrows[" + std::to_string(i) + "]";
    detail::check_allowed_keys(arrows[i], path, {"cell", "action"});
    const auto cell = parse_cell(detail::require_field(arrows[i], path, "cell"), path + ".cell",
                                 cfg.rows, cfg.cols);
    const int action = detail::as_int(detail::require_field(arrows[i], path, "action"),
                                      path + ".action");
    if (action < 0 || action >= kActions) detail::fail_at(path + ".action", "expected 0..3");
    cfg.arrows.emplace_back(cell, action);
  }
  const auto& terminals = detail::as_array(detail::require_field(doc, root, "terminals"),
                                           root + ".terminals");
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    const std::string path = root + ".terminals[" + std::to_string(i) + "]";
    detail::check_allowed_keys(terminals[i], path, {"cell", "reward"});
    const auto cell = parse_cell(detail::require_field(terminals[i], path, "cell"),
                                 path + ".cell", cfg.rows, cfg.cols);
    const double reward = detail::as_number(detail::require_field(terminals[i], path, "reward"),
                                            path + ".reward");
    cfg.terminals.emplace_back(cell, reward);
  }
  cfg.eps_eval = detail::as_number(detail::require_field(doc, root, "eps_eval"),
                                   root + ".eps_eval");
  cfg.eps_behavior = detail::as_number(detail::require_field(doc, root, "eps_behavior"),
                                       root + ".eps_behavior");
  if (doc.contains("eps_behavior_corridor") && !doc["eps_behavior_corridor"].is_null()) {
    cfg.eps_behavior_corridor =
        detail::as_number(doc["eps_behavior_corridor"], root + ".eps_behavior_corridor");
  }
  cfg.express_corridor_eps = detail::as_number(
      detail::require_field(doc, root, "express_corridor_eps"), root + ".express_corridor_eps");
  cfg.gamma = detail::as_number(detail::require_field(doc, root, "gamma"), root + ".gamma");
  cfg.t_max = detail::as_int(detail::require_field(doc, root, "t_max"), root + ".t_max");
  return cfg;
}

std::string gridworld_config_to_json(const GridworldConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["rows"] = cfg.rows;
  doc["cols"] = cfg.cols;
  doc["start"] = {cfg.start[0], cfg.start[1]};
  doc["corridor"] = json::array();
  for (const auto& c : cfg.corridor) doc["corridor"].push_back({c[0], c[1]});
  doc["arrows"] = json::array();
  for (const auto& [cell, action] : cfg.arrows) {
    doc["arrows"].push_back({{"cell", {cell[0], cell[1]}}, {"action", action}});
  }
  doc["terminals"] = json::array();
  for (const auto& [cell, reward] : cfg.terminals) {
    doc["terminals"].push_back({{"cell", {cell[0], cell[1]}}, {"reward", reward}});
  }
  doc["eps_eval"] = cfg.eps_eval;
  doc["eps_behavior"] = cfg.eps_behavior;
  if (cfg.eps_behavior_corridor.has_value()) {
    doc["eps_behavior_corridor"] = *cfg.eps_behavior_corridor;
  } else {
    doc["eps_behavior_corridor"] = nullptr;
  }
  doc["express_corridor_eps"] = cfg.express_corridor_eps;
  doc["gamma"] = cfg.gamma;
  doc["t_max"] = cfg.t_max;
  return doc.dump(2);
}

GridworldModel build_gridworld(const GridworldConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1) {
    throw std::invalid_argument("gridworld: rows and cols must be positive");
  }
  auto check_eps = [](double e, const char* what) {
    if (!(e >= 0.0) || e > 1.0) {
      throw std::invalid_argument(std::string("gridworld: ") + what + " must lie in [0, 1]");
    }
  };
  check_eps(cfg.eps_eval, "eps_eval");
  check_eps(cfg.eps_behavior, "eps_behavior");
  if (cfg.eps_behavior_corridor) check_eps(*cfg.eps_behavior_corridor, "eps_behavior_corridor");
  check_eps(cfg.express_corridor_eps, "express_corridor_eps");

  const auto flat = [&](const std::array<int, 2>& cell) {
    return static_cast<std::size_t>(cell[0]) * cfg.cols + cell[1];
  };
  std::set<std::size_t> arrow_cells, terminal_cells;
  for (const auto& [cell, action] : cfg.arrows) {
    (void)action;
    if (!arrow_cells.insert(flat(cell)).second) {
      throw std::invalid_argument("gridworld: duplicate arrow cell");
    }
  }
  for (const auto& [cell, reward] : cfg.terminals) {
    (void)reward;
    const auto f = flat(cell);
    if (!terminal_cells.insert(f).second) {
      throw std::invalid_argument("gridworld: duplicate terminal cell");
    }
    if (arrow_cells.count(f)) {
      throw std::invalid_argument("gridworld: cell is both an arrow cell and a terminal");
    }
  }
  for (const auto& c : cfg.corridor) {
    if (!arrow_cells.count(flat(c))) {
      throw std::invalid_argument("gridworld: corridor cell has no arrow");
    }
  }
  if (!arrow_cells.count(flat(cfg.start))) {
    throw std::invalid_argument("gridworld: start cell has no arrow");
  }

  GridworldModel model;
  model.config = cfg;
  model.state_of_cell.assign(static_cast<std::size_t>(cfg.rows) * cfg.cols, -1);
  // Row-major enumeration of free cells defines the state ids.
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      const std::size_t f = static_cast<std::size_t>(r) * cfg.cols + c;
      if (arrow_cells.count(f) || terminal_cells.count(f)) {
        model.state_of_cell[f] = static_cast<int>(model.cell_of_state.size());
        model.cell_of_state.push_back({r, c});
      }
    }
  }
  const int n = static_cast<int>(model.cell_of_state.size());

  std::vector<int> arrow_of_state(static_cast<std::size_t>(n), -1);
  std::vector<double> reward_of_state(static_cast<std::size_t>(n), 0.0);
  for (const auto& [cell, action] : cfg.arrows) arrow_of_state[model.state_at(cell[0], cell[1])] = action;
  MdpSpec& mdp = model.mdp;
  mdp.n_states = n;
  mdp.n_actions = kActions;
  mdp.gamma = cfg.gamma;
  mdp.t_max = cfg.t_max;
  mdp.initial_dist.assign(static_cast<std::size_t>(n), 0.0);
  mdp.terminal.assign(static_cast<std::size_t>(n), 0);
  mdp.transition.assign(static_cast<std::size_t>(n) * kActions * n, 0.0);
  mdp.reward.assign(static_cast<std::size_t>(n) * kActions, 0.0);
  for (const auto& [cell, reward] : cfg.terminals) {
    const int s = model.state_at(cell[0], cell[1]);
    mdp.terminal[static_cast<std::size_t>(s)] = 1;
    reward_of_state[static_cast<std::size_t>(s)] = reward;
  }
  model.start_state = model.state_at(cfg.start[0], cfg.start[1]);
  mdp.initial_dist[static_cast<std::size_t>(model.start_state)] = 1.0;

  model.is_corridor.assign(static_cast<std::size_t>(n), 0);
  for (const auto& c : cfg.corridor) {
    model.is_corridor[static_cast<std::size_t>(model.state_at(c[0], c[1]))] = 1;
  }

  for (int s = 0; s < n; ++s) {
    if (mdp.is_terminal(s)) {
      for (int a = 0; a < kActions; ++a) mdp.p(s, a, s) = 1.0;
      continue;
    }
    const auto [r, c] = model.cell_of_state[static_cast<std::size_t>(s)];
    for (int a = 0; a < kActions; ++a) {
      int nr = r + kDRow[a];
      int nc = c + kDCol[a];
      if (nr < 0 || nr >= cfg.rows || nc < 0 || nc >= cfg.cols ||
          model.state_of_cell[static_cast<std::size_t>(nr) * cfg.cols + nc] < 0) {
        nr = r;  // bump into a wall or the border: stay in place
        nc = c;
      }
      const int s2 = model.state_at(nr, nc);
      mdp.p(s, a, s2) = 1.0;
      if (mdp.is_terminal(s2)) mdp.r(s, a) = reward_of_state[static_cast<std::size_t>(s2)];
    }
  }

  auto eps_greedy = [&](double eps, std::optional<double> eps_corridor) {
    PolicySpec pi;
    pi.n_states = n;
    pi.n_actions = kActions;
    pi.prob.assign(static_cast<std::size_t>(n) * kActions, 0.0);
    for (int s = 0; s < n; ++s) {
      if (mdp.is_terminal(s)) {
        for (int a = 0; a < kActions; ++a) pi.at(s, a) = 1.0 / kActions;
        continue;
      }
      const double e = (eps_corridor && model.is_corridor[static_cast<std::size_t>(s)])
                           ? *eps_corridor
                           : eps;
      for (int a = 0; a < kActions; ++a) pi.at(s, a) = e / kActions;
      pi.at(s, arrow_of_state[static_cast<std::size_t>(s)]) += 1.0 - e;
    }
    return pi;
  };
  model.pi_e = eps_greedy(cfg.eps_eval, std::nullopt);
  model.pi_b = eps_greedy(cfg.eps_behavior, cfg.eps_behavior_corridor);

  validate_mdp(mdp);
  validate_policy(mdp, model.pi_e);
  validate_policy(mdp, model.pi_b);
  return model;
}

GridworldModel canonical_dilly_dallying() {
  return build_gridworld(parse_gridworld_config(detail::kGridworldLayoutJson));
}

GridworldModel canonical_express() {
  GridworldConfig cfg = parse_gridworld_config(detail::kGridworldLayoutJson);
  cfg.name = "express";
  cfg.eps_behavior_corridor = cfg.express_corridor_eps;
  return build_gridworld(cfg);
}

}  // namespace osiris
