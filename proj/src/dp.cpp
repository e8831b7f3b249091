#include "osiris/dp.hpp"

#include <algorithm>
#include <stdexcept>

namespace osiris {

namespace {

// One evaluation sweep: V_out(s) = sum_a pi(a|s) [r(s,a) + gamma sum_s' P V_in(s')].
void sweep(const MdpSpec& mdp, const PolicySpec& pi, const std::vector<double>& v_in,
           std::vector<double>& v_out) {
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) {
      v_out[s] = 0.0;
      continue;
    }
    double v = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double pa = pi.at(s, a);
      if (pa == 0.0) continue;
      double q = mdp.r(s, a);
      const auto row = mdp.transition_row(s, a);
      double ev = 0.0;
      for (int s2 = 0; s2 < mdp.n_states; ++s2) ev += row[s2] * v_in[s2];
      q += mdp.gamma * ev;
      v += pa * q;
    }
    v_out[s] = v;
  }
}

}  // namespace

PolicyValueResult exact_policy_value(const MdpSpec& mdp, const PolicySpec& pi) {
  validate_mdp(mdp);
  validate_policy(mdp, pi);
  PolicyValueResult res;
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);
  std::vector<double> v_next(v.size(), 0.0);
  bool fixpoint = false;
  for (int k = 0; k < mdp.t_max; ++k) {
    sweep(mdp, pi, v, v_next);
    if (v_next == v) {
      fixpoint = true;
      break;
    }
    std::swap(v, v_next);
  }
  res.state_values = v;
  res.truncated = !fixpoint;

  // Survival recursion: u_k(s) = P(no terminal state entered within k steps | s).
  std::vector<double> u(v.size(), 0.0);
  for (int s = 0; s < mdp.n_states; ++s) u[s] = mdp.is_terminal(s) ? 0.0 : 1.0;
  std::vector<double> u_next(u.size(), 0.0);
  for (int k = 0; k < mdp.t_max; ++k) {
    bool all_zero = true;
    for (int s = 0; s < mdp.n_states; ++s) {
      if (mdp.is_terminal(s)) {
        u_next[s] = 0.0;
        continue;
      }
      double m = 0.0;
      for (int a = 0; a < mdp.n_actions; ++a) {
        const double pa = pi.at(s, a);
        if (pa == 0.0) continue;
        const auto row = mdp.transition_row(s, a);
        double ev = 0.0;
        for (int s2 = 0; s2 < mdp.n_states; ++s2) ev += row[s2] * u[s2];
        m += pa * ev;
      }
      u_next[s] = m;
      if (m != 0.0) all_zero = false;
    }
    std::swap(u, u_next);
    if (all_zero) break;
  }

  double value = 0.0;
  double mass = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    value += mdp.initial_dist[s] * res.state_values[s];
    mass += mdp.initial_dist[s] * u[s];
  }
  res.value = value;
  res.unabsorbed_mass = mass;
  return res;
}

std::vector<double> exact_q(const MdpSpec& mdp, const PolicySpec& pi) {
  const auto res = exact_policy_value(mdp, pi);
  std::vector<double> q(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions, 0.0);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const auto row = mdp.transition_row(s, a);
      double ev = 0.0;
      for (int s2 = 0; s2 < mdp.n_states; ++s2) ev += row[s2] * res.state_values[s2];
      q[static_cast<std::size_t>(s) * mdp.n_actions + a] = mdp.r(s, a) + mdp.gamma * ev;
    }
  }
  return q;
}

PolicySpec composite_policy(const PolicySpec& pi_keep, const PolicySpec& pi_drop,
                            const RelevanceMapping& mask) {
  if (pi_keep.n_states != pi_drop.n_states || pi_keep.n_actions != pi_drop.n_actions) {
    throw std::invalid_argument("composite_policy: policy shapes differ");
  }
  if (mask.n_states() != pi_keep.n_states) {
    throw std::invalid_argument("composite_policy: mask size does not match the policies");
  }
  PolicySpec out = pi_drop;
  for (int s = 0; s < out.n_states; ++s) {
    if (!mask.keeps(s)) continue;
    for (int a = 0; a < out.n_actions; ++a) out.at(s, a) = pi_keep.at(s, a);
  }
  return out;
}

namespace {

// support_a/support_b: when non-null, only actions with positive probability
// under at least one of them enter the Q-range; null means all actions do.
RelevanceMapping relevance_from_q(const MdpSpec& mdp, const std::vector<double>& q,
                                  const PolicySpec* support_a, const PolicySpec* support_b,
                                  double tol) {
  RelevanceMapping mask = RelevanceMapping::no_states(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (int a = 0; a < mdp.n_actions; ++a) {
      if (support_a != nullptr && support_a->at(s, a) == 0.0 && support_b->at(s, a) == 0.0) {
        continue;
      }
      const double qa = q[static_cast<std::size_t>(s) * mdp.n_actions + a];
      if (!seen) {
        lo = hi = qa;
        seen = true;
      } else {
        lo = std::min(lo, qa);
        hi = std::max(hi, qa);
      }
    }
    if (seen && hi - lo > tol) mask.keep[static_cast<std::size_t>(s)] = 1;
  }
  return mask;
}

}  // namespace

RelevanceMapping true_relevance(const MdpSpec& mdp, const PolicySpec& pi_e, double tol) {
  const auto q = exact_q(mdp, pi_e);
  return relevance_from_q(mdp, q, nullptr, nullptr, tol);
}

RelevanceMapping true_relevance(const MdpSpec& mdp, const PolicySpec& pi_e,
                                const PolicySpec& pi_b, double tol) {
  validate_policy(mdp, pi_b);
  const auto q = exact_q(mdp, pi_e);
  return relevance_from_q(mdp, q, &pi_e, &pi_b, tol);
}

}  // namespace osiris
