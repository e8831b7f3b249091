#include "osiris/mdp_json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"

namespace osiris {

namespace {

using detail::json;

constexpr const char* kFormat = "osiris-mdp";
constexpr int kVersion = 1;

std::vector<double> parse_number_vector(const json& j, const std::string& path,
                                        std::size_t expected) {
  const auto& arr = detail::as_array(j, path);
  if (arr.size() != expected) {
    detail::fail_at(path, "expected " + std::to_string(expected) + " entries, found " +
                              std::to_string(arr.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(detail::as_number(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

std::string mdp_to_json(const MdpDocument& doc) {
  validate_mdp(doc.mdp);
  for (const auto& [name, pi] : doc.policies) validate_policy(doc.mdp, pi);
  const MdpSpec& m = doc.mdp;
  json out;
  out["format"] = kFormat;
  out["version"] = kVersion;
  out["n_states"] = m.n_states;
  out["n_actions"] = m.n_actions;
  out["gamma"] = m.gamma;
  out["t_max"] = m.t_max;
  out["initial_dist"] = m.initial_dist;
  json term = json::array();
  for (auto t : m.terminal) term.push_back(t != 0);
  out["terminal"] = std::move(term);
  json trans = json::array();
  for (int s = 0; s < m.n_states; ++s) {
    json per_action = json::array();
    for (int a = 0; a < m.n_actions; ++a) {
      const auto row = m.transition_row(s, a);
      per_action.push_back(std::vector<double>(row.begin(), row.end()));
    }
    trans.push_back(std::move(per_action));
  }
  out["transition"] = std::move(trans);
  json rew = json::array();
  for (int s = 0; s < m.n_states; ++s) {
    std::vector<double> row(static_cast<std::size_t>(m.n_actions));
    for (int a = 0; a < m.n_actions; ++a) row[static_cast<std::size_t>(a)] = m.r(s, a);
    rew.push_back(std::move(row));
  }
  out["reward"] = std::move(rew);
  json pols = json::object();
  for (const auto& [name, pi] : doc.policies) {
    json rows = json::array();
    for (int s = 0; s < pi.n_states; ++s) {
      const auto row = pi.row(s);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    pols[name] = std::move(rows);
  }
  out["policies"] = std::move(pols);
  return out.dump(2);
}

MdpDocument mdp_from_json(const std::string& text) {
  const json doc = detail::parse_document(text, "mdp document");
  const std::string root = "mdp";
  detail::check_allowed_keys(doc, root,
                             {"format", "version", "n_states", "n_actions", "gamma", "t_max",
                              "initial_dist", "terminal", "transition", "reward", "policies"});
  const auto format = detail::as_string(detail::require_field(doc, root, "format"),
                                        root + ".format");
  if (format != kFormat) detail::fail_at(root + ".format", "expected \"" + std::string(kFormat) + "\"");
  const int version = detail::as_int(detail::require_field(doc, root, "version"),
                                     root + ".version");
  if (version != kVersion) {
    detail::fail_at(root + ".version", "unsupported version " + std::to_string(version));
  }

  MdpDocument out;
  MdpSpec& m = out.mdp;
  m.n_states = detail::as_int(detail::require_field(doc, root, "n_states"), root + ".n_states");
  m.n_actions = detail::as_int(detail::require_field(doc, root, "n_actions"),
                               root + ".n_actions");
  if (m.n_states < 1 || m.n_actions < 1) {
    detail::fail_at(root, "n_states and n_actions must be positive");
  }
  m.gamma = detail::as_number(detail::require_field(doc, root, "gamma"), root + ".gamma");
  m.t_max = detail::as_int(detail::require_field(doc, root, "t_max"), root + ".t_max");
  const auto ns = static_cast<std::size_t>(m.n_states);
  const auto na = static_cast<std::size_t>(m.n_actions);

  m.initial_dist = parse_number_vector(detail::require_field(doc, root, "initial_dist"),
                                       root + ".initial_dist", ns);
  const auto& term = detail::as_array(detail::require_field(doc, root, "terminal"),
                                      root + ".terminal");
  if (term.size() != ns) detail::fail_at(root + ".terminal", "expected one flag per state");
  for (std::size_t s = 0; s < term.size(); ++s) {
    m.terminal.push_back(
        detail::as_bool(term[s], root + ".terminal[" + std::to_string(s) + "]") ? 1 : 0);
  }

  const auto& trans = detail::as_array(detail::require_field(doc, root, "transition"),
                                       root + ".transition");
  if (trans.size() != ns) detail::fail_at(root + ".transition", "expected one entry per state");
  m.transition.reserve(ns * na * ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const std::string spath = root + ".transition[" + std::to_string(s) + "]";
    const auto& per_action = detail::as_array(trans[s], spath);
    if (per_action.size() != na) detail::fail_at(spath, "expected one row per action");
    for (std::size_t a = 0; a < na; ++a) {
      const auto row = parse_number_vector(per_action[a],
                                           spath + "[" + std::to_string(a) + "]", ns);
      m.transition.insert(m.transition.end(), row.begin(), row.end());
    }
  }

  const auto& rew = detail::as_array(detail::require_field(doc, root, "reward"),
                                     root + ".reward");
  if (rew.size() != ns) detail::fail_at(root + ".reward", "expected one row per state");
  m.reward.reserve(ns * na);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto row = parse_number_vector(rew[s], root + ".reward[" + std::to_string(s) + "]", na);
    m.reward.insert(m.reward.end(), row.begin(), row.end());
  }

  const auto& pols = detail::require_field(doc, root, "policies");
  detail::require_object(pols, root + ".policies");
  for (const auto& [name, rows] : pols.items()) {
    const std::string ppath = root + ".policies." + name;
    const auto& arr = detail::as_array(rows, ppath);
    if (arr.size() != ns) detail::fail_at(ppath, "expected one row per state");
    PolicySpec pi;
    pi.n_states = m.n_states;
    pi.n_actions = m.n_actions;
    pi.prob.reserve(ns * na);
    for (std::size_t s = 0; s < ns; ++s) {
      const auto row = parse_number_vector(arr[s], ppath + "[" + std::to_string(s) + "]", na);
      pi.prob.insert(pi.prob.end(), row.begin(), row.end());
    }
    out.policies.emplace(name, std::move(pi));
  }

  try {
    validate_mdp(m);
    for (const auto& [name, pi] : out.policies) validate_policy(m, pi);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(root + ": " + e.what());
  }
  return out;
}

void save_mdp_file(const MdpDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << mdp_to_json(doc) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

MdpDocument load_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return mdp_from_json(buf.str());
}

}  // namespace osiris
