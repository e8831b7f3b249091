#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace osiris {

// Finite MDP with tabular transition and reward models.
//
// Layout of the flat arrays:
//   transition[(s * n_actions + a) * n_states + s2] = P(s2 | s, a)
//   reward[s * n_actions + a]                       = r(s, a)
// Terminal states absorb: the sampler stops before acting in them, and
// policy evaluation pins their value to zero.
struct MdpSpec {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 1.0;
  int t_max = 1000;
  std::vector<double> initial_dist;      // n_states
  std::vector<std::uint8_t> terminal;    // n_states, 0/1
  std::vector<double> transition;        // n_states * n_actions * n_states
  std::vector<double> reward;            // n_states * n_actions

  double p(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double& p(int s, int a, int s2) {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
  double& r(int s, int a) { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
  std::span<const double> transition_row(int s, int a) const {
    return {transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
            static_cast<std::size_t>(n_states)};
  }
  bool is_terminal(int s) const { return terminal[static_cast<std::size_t>(s)] != 0; }
};

// Stationary stochastic policy over the same state/action sets.
// prob[s * n_actions + a] = pi(a | s). Every row, including rows of terminal
// states, must be a probability distribution.
struct PolicySpec {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> prob;

  double at(int s, int a) const { return prob[static_cast<std::size_t>(s) * n_actions + a]; }
  double& at(int s, int a) { return prob[static_cast<std::size_t>(s) * n_actions + a]; }
  std::span<const double> row(int s) const {
    return {prob.data() + static_cast<std::size_t>(s) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }
};

// One episode: states has one more entry than actions/rewards.
struct Trajectory {
  std::vector<int> states;
  std::vector<int> actions;
  std::vector<double> rewards;

  int length() const { return static_cast<int>(actions.size()); }
};

struct TrajectoryBatch {
  std::vector<Trajectory> trajectories;
  std::uint64_t seed = 0;  // base seed; trajectory i used derive_stream(seed, i)

  int size() const { return static_cast<int>(trajectories.size()); }
};

// Per-state keep/omit mask: keep[s] == 1 means state s retains its importance
// weight factor.
struct RelevanceMapping {
  std::vector<std::uint8_t> keep;

  bool keeps(int s) const { return keep[static_cast<std::size_t>(s)] != 0; }
  int n_states() const { return static_cast<int>(keep.size()); }
  int count_kept() const;

  static RelevanceMapping all_states(int n_states);
  static RelevanceMapping no_states(int n_states);
};

// Time-offset-dependent keep/omit mask for per-reward weights. For a reward
// collected dt steps after visiting state s (dt may be negative: the visit
// happened after the reward), at(s, dt) decides whether that visit's
// importance factor is kept. Offsets inside [window_lo, window_hi] are stored
// explicitly; offsets outside fall back to the defaults. An empty window
// (window_lo > window_hi) uses only the defaults.
struct TimedRelevanceMapping {
  int n_states = 0;
  int window_lo = 0;
  int window_hi = -1;
  std::uint8_t default_before = 0;  // dt < window_lo
  std::uint8_t default_after = 0;   // dt > window_hi
  std::vector<std::uint8_t> bits;   // n_states * window_size, [s][dt - window_lo]

  int window_size() const { return window_hi >= window_lo ? window_hi - window_lo + 1 : 0; }
  bool keeps(int s, long long dt) const {
    if (dt < window_lo) return default_before != 0;
    if (dt > window_hi) return default_after != 0;
    return bits[static_cast<std::size_t>(s) * window_size() + (dt - window_lo)] != 0;
  }
  std::uint8_t& bit(int s, int dt) {
    return bits[static_cast<std::size_t>(s) * window_size() + (dt - window_lo)];
  }

  // Mask reproducing per-decision weighting: keep every visit at or before
  // the reward (dt >= 0), drop visits after it.
  static TimedRelevanceMapping per_decision(int n_states);
};

// Both throw std::invalid_argument with a description of the first problem
// found. Probability rows must sum to 1 within 1e-12.
void validate_mdp(const MdpSpec& mdp);
void validate_policy(const MdpSpec& mdp, const PolicySpec& pi);

// Episode sampling. The stream draws, in order: initial state, then per step
// an action followed by a next state. Episodes stop on entering a terminal
// state or after t_max steps. sample_batch gives trajectory i its own
// substream derive_stream(seed, i), so batches are independent of iteration
// order and worker count.
Trajectory sample_trajectory(const MdpSpec& mdp, const PolicySpec& pi, std::uint64_t seed);
TrajectoryBatch sample_batch(const MdpSpec& mdp, const PolicySpec& pi, int n,
                             std::uint64_t seed);

// Discounted sum of rewards for steps t_begin..t_end inclusive (0-based),
// discounted from t_begin: sum_t gamma^(t - t_begin) * rewards[t].
// Returns 0 when t_begin > t_end.
double return_between(const Trajectory& traj, double gamma, int t_begin, int t_end);
double total_return(const Trajectory& traj, double gamma);

}  // namespace osiris
