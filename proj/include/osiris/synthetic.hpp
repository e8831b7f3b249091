#pragma once

#include "osiris/mdp_json.hpp"

namespace osiris {

// Small fixed MDPs with closed-form values, used by the diagnostics command
// and the test suite as references with known moments.

// Three states, two actions. State 0 transitions to state 1 under either
// action with reward 0 and identical transition rows, so the action taken
// there cannot affect anything; state 1 pays +1 (action 0) or -1 (action 1)
// and terminates. pi_e = (0.9, 0.1) then (0.8, 0.2); pi_b is uniform.
// V(pi_e) = 0.6, and importance weights take four known values.
inline MdpDocument two_stage_chain() {
  MdpDocument doc;
  MdpSpec& m = doc.mdp;
  m.n_states = 3;
  m.n_actions = 2;
  m.gamma = 1.0;
  m.t_max = 10;
  m.initial_dist = {1.0, 0.0, 0.0};
  m.terminal = {0, 0, 1};
  m.transition.assign(3 * 2 * 3, 0.0);
  m.reward.assign(3 * 2, 0.0);
  for (int a = 0; a < 2; ++a) {
    m.p(0, a, 1) = 1.0;  // identical rows: state 0 is padding
    m.p(1, a, 2) = 1.0;
    m.p(2, a, 2) = 1.0;
  }
  m.r(1, 0) = 1.0;
  m.r(1, 1) = -1.0;
  PolicySpec pi_e{3, 2, {0.9, 0.1, 0.8, 0.2, 0.5, 0.5}};
  PolicySpec pi_b{3, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
  doc.policies.emplace("pi_e", std::move(pi_e));
  doc.policies.emplace("pi_b", std::move(pi_b));
  return doc;
}

// A deterministic corridor of n_hubs states ending in a terminal state.
// Every action moves to the next state and pays 0; the policies are
// epsilon-greedy (4 actions, greedy action 1) with the given exploration
// rates, so each step contributes an importance ratio of
// (1 - 3 eps_e / 4) / (1 - 3 eps_b / 4) or (eps_e / eps_b), with mean 1
// under the behavior policy. Episode length is always n_hubs.
inline MdpDocument ratio_hub_chain(int n_hubs, double eps_e, double eps_b) {
  if (n_hubs < 1) throw std::invalid_argument("ratio_hub_chain: need at least one state");
  MdpDocument doc;
  MdpSpec& m = doc.mdp;
  const int n = n_hubs + 1;
  m.n_states = n;
  m.n_actions = 4;
  m.gamma = 1.0;
  m.t_max = n_hubs + 2;
  m.initial_dist.assign(static_cast<std::size_t>(n), 0.0);
  m.initial_dist[0] = 1.0;
  m.terminal.assign(static_cast<std::size_t>(n), 0);
  m.terminal[static_cast<std::size_t>(n - 1)] = 1;
  m.transition.assign(static_cast<std::size_t>(n) * 4 * n, 0.0);
  m.reward.assign(static_cast<std::size_t>(n) * 4, 0.0);
  for (int s = 0; s < n; ++s) {
    const int s2 = m.is_terminal(s) ? s : s + 1;
    for (int a = 0; a < 4; ++a) m.p(s, a, s2) = 1.0;
  }
  auto eps_greedy = [&](double eps) {
    PolicySpec pi;
    pi.n_states = n;
    pi.n_actions = 4;
    pi.prob.assign(static_cast<std::size_t>(n) * 4, 0.0);
    for (int s = 0; s < n; ++s) {
      if (m.is_terminal(s)) {
        for (int a = 0; a < 4; ++a) pi.at(s, a) = 0.25;
        continue;
      }
      for (int a = 0; a < 4; ++a) pi.at(s, a) = eps / 4.0;
      pi.at(s, 1) += 1.0 - eps;
    }
    return pi;
  };
  doc.policies.emplace("pi_e", eps_greedy(eps_e));
  doc.policies.emplace("pi_b", eps_greedy(eps_b));
  return doc;
}

// Four states: a start whose two actions carry importance ratios above and
// below 1, two payoff states (+1 / -1) where the policies agree, and a
// terminal state. Action up_a0 / up_a1 give the chance of landing on the +1
// state, so Q(start, a0) - Q(start, a1) = 2 (up_a0 - up_a1). Every episode
// visits the start state exactly once and lasts exactly two steps.
inline MdpDocument coin_split_chain(double up_a0, double up_a1, double pi_e_a0) {
  if (!(up_a0 >= 0.0 && up_a0 <= 1.0 && up_a1 >= 0.0 && up_a1 <= 1.0)) {
    throw std::invalid_argument("coin_split_chain: branch odds must lie in [0, 1]");
  }
  if (!(pi_e_a0 > 0.0 && pi_e_a0 < 1.0)) {
    throw std::invalid_argument("coin_split_chain: pi_e_a0 must lie in (0, 1)");
  }
  MdpDocument doc;
  MdpSpec& m = doc.mdp;
  m.n_states = 4;
  m.n_actions = 2;
  m.gamma = 1.0;
  m.t_max = 10;
  m.initial_dist = {1.0, 0.0, 0.0, 0.0};
  m.terminal = {0, 0, 0, 1};
  m.transition.assign(4 * 2 * 4, 0.0);
  m.reward.assign(4 * 2, 0.0);
  m.p(0, 0, 1) = up_a0;
  m.p(0, 0, 2) = 1.0 - up_a0;
  m.p(0, 1, 1) = up_a1;
  m.p(0, 1, 2) = 1.0 - up_a1;
  for (int a = 0; a < 2; ++a) {
    m.p(1, a, 3) = 1.0;
    m.p(2, a, 3) = 1.0;
    m.p(3, a, 3) = 1.0;
    m.r(1, a) = 1.0;
    m.r(2, a) = -1.0;
  }
  PolicySpec pi_e{4, 2, {pi_e_a0, 1.0 - pi_e_a0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
  PolicySpec pi_b{4, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
  doc.policies.emplace("pi_e", std::move(pi_e));
  doc.policies.emplace("pi_b", std::move(pi_b));
  return doc;
}

// coin_split_chain with equal branch odds: the start state's action moves
// the importance ratio (0.7/0.5 vs 0.3/0.5) but not the outcome, so its
// Q-range is exactly zero and a relevance test must not flag it beyond its
// false-positive budget.
inline MdpDocument ratio_only_chain() { return coin_split_chain(0.5, 0.5, 0.7); }

// Nested keep-masks over the first counts[0] < counts[1] < ... hub states of
// ratio_hub_chain, for the weight-length diagnostics.
inline std::vector<RelevanceMapping> nested_hub_masks(int n_states,
                                                      const std::vector<int>& counts) {
  std::vector<RelevanceMapping> masks;
  for (int c : counts) {
    if (c < 0 || c >= n_states) throw std::invalid_argument("nested_hub_masks: count out of range");
    RelevanceMapping m = RelevanceMapping::no_states(n_states);
    for (int s = 0; s < c; ++s) m.keep[static_cast<std::size_t>(s)] = 1;
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace osiris
