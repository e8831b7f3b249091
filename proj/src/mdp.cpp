#include "osiris/mdp.hpp"

#include <cmath>
#include <stdexcept>

#include "osiris/rng.hpp"

namespace osiris {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_distribution(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) {  // catches negatives and NaN
      throw std::invalid_argument(what + ": negative or NaN probability");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTol) {
    throw std::invalid_argument(what + ": probabilities sum to " + std::to_string(sum) +
                                ", expected 1 within 1e-12");
  }
}

}  // namespace

int RelevanceMapping::count_kept() const {
  int n = 0;
  for (auto b : keep) n += (b != 0);
  return n;
}

RelevanceMapping RelevanceMapping::all_states(int n_states) {
  return {std::vector<std::uint8_t>(static_cast<std::size_t>(n_states), 1)};
}

RelevanceMapping RelevanceMapping::no_states(int n_states) {
  return {std::vector<std::uint8_t>(static_cast<std::size_t>(n_states), 0)};
}

TimedRelevanceMapping TimedRelevanceMapping::per_decision(int n_states) {
  TimedRelevanceMapping m;
  m.n_states = n_states;
  m.window_lo = 0;
  m.window_hi = -1;
  m.default_before = 0;
  m.default_after = 1;
  return m;
}

void validate_mdp(const MdpSpec& mdp) {
  if (mdp.n_states <= 0 || mdp.n_actions <= 0) {
    throw std::invalid_argument("mdp: n_states and n_actions must be positive");
  }
  if (!(mdp.gamma > 0.0) || mdp.gamma > 1.0) {
    throw std::invalid_argument("mdp: gamma must lie in (0, 1]");
  }
  if (mdp.t_max < 1) throw std::invalid_argument("mdp: t_max must be at least 1");
  const auto ns = static_cast<std::size_t>(mdp.n_states);
  const auto na = static_cast<std::size_t>(mdp.n_actions);
  if (mdp.initial_dist.size() != ns) throw std::invalid_argument("mdp: initial_dist size mismatch");
  if (mdp.terminal.size() != ns) throw std::invalid_argument("mdp: terminal size mismatch");
  if (mdp.transition.size() != ns * na * ns) {
    throw std::invalid_argument("mdp: transition size mismatch");
  }
  if (mdp.reward.size() != ns * na) throw std::invalid_argument("mdp: reward size mismatch");
  for (double r : mdp.reward) {
    if (!std::isfinite(r)) throw std::invalid_argument("mdp: non-finite reward");
  }
  check_distribution(mdp.initial_dist, "mdp initial_dist");
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      check_distribution(mdp.transition_row(s, a),
                         "mdp transition row (s=" + std::to_string(s) +
                             ", a=" + std::to_string(a) + ")");
    }
  }
  bool any_start_nonterminal = false;
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.initial_dist[s] > 0.0 && !mdp.is_terminal(s)) any_start_nonterminal = true;
  }
  if (!any_start_nonterminal) {
    throw std::invalid_argument("mdp: initial distribution has no mass on non-terminal states");
  }
}

void validate_policy(const MdpSpec& mdp, const PolicySpec& pi) {
  if (pi.n_states != mdp.n_states || pi.n_actions != mdp.n_actions) {
    throw std::invalid_argument("policy: shape does not match the MDP");
  }
  if (pi.prob.size() !=
      static_cast<std::size_t>(pi.n_states) * static_cast<std::size_t>(pi.n_actions)) {
    throw std::invalid_argument("policy: prob size mismatch");
  }
  for (int s = 0; s < pi.n_states; ++s) {
    check_distribution(pi.row(s), "policy row (s=" + std::to_string(s) + ")");
  }
}

Trajectory sample_trajectory(const MdpSpec& mdp, const PolicySpec& pi, std::uint64_t seed) {
  SplitMix64 stream(seed);
  Trajectory traj;
  int s = stream.categorical(mdp.initial_dist);
  traj.states.push_back(s);
  for (int t = 0; t < mdp.t_max; ++t) {
    if (mdp.is_terminal(s)) break;
    const int a = stream.categorical(pi.row(s));
    traj.actions.push_back(a);
    traj.rewards.push_back(mdp.r(s, a));
    s = stream.categorical(mdp.transition_row(s, a));
    traj.states.push_back(s);
  }
  return traj;
}

TrajectoryBatch sample_batch(const MdpSpec& mdp, const PolicySpec& pi, int n,
                             std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_batch: n must be non-negative");
  TrajectoryBatch batch;
  batch.seed = seed;
  batch.trajectories.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    batch.trajectories.push_back(
        sample_trajectory(mdp, pi, derive_stream(seed, static_cast<std::uint64_t>(i))));
  }
  return batch;
}

double return_between(const Trajectory& traj, double gamma, int t_begin, int t_end) {
  if (t_begin > t_end) return 0.0;
  if (t_begin < 0 || t_end >= traj.length()) {
    throw std::invalid_argument("return_between: step range outside the trajectory");
  }
  // Backward accumulation keeps the result identical to the recursive
  // definition g_t = r_t + gamma * g_{t+1} used elsewhere.
  double g = 0.0;
  for (int t = t_end; t >= t_begin; --t) {
    g = traj.rewards[static_cast<std::size_t>(t)] + gamma * g;
  }
  return g;
}

double total_return(const Trajectory& traj, double gamma) {
  if (traj.length() == 0) return 0.0;
  return return_between(traj, gamma, 0, traj.length() - 1);
}

}  // namespace osiris
