#pragma once

#include <vector>

#include "osiris/mdp.hpp"

namespace osiris {

struct PolicyValueResult {
  double value = 0.0;                    // initial-distribution-weighted state value
  std::vector<double> state_values;      // V(s), zero at terminal states
  double unabsorbed_mass = 0.0;          // P(episode still running after t_max steps)
  bool truncated = false;                // true when the t_max sweeps never hit an exact fixpoint
};

// Exact policy evaluation by t_max backward sweeps:
//   Q = r + gamma * P V,  V(s) = sum_a pi(a|s) Q(s,a),  V(terminal) = 0,
// stopping early when a sweep reproduces V bit-for-bit.
PolicyValueResult exact_policy_value(const MdpSpec& mdp, const PolicySpec& pi);

// Q(s, a) = r(s, a) + gamma * sum_s' P(s'|s,a) V(s'), flattened like rewards.
std::vector<double> exact_q(const MdpSpec& mdp, const PolicySpec& pi);

// Policy that follows pi_keep in kept states and pi_drop everywhere else.
PolicySpec composite_policy(const PolicySpec& pi_keep, const PolicySpec& pi_drop,
                            const RelevanceMapping& mask);

// States where the evaluation policy's action choice changes expected
// outcome: keep[s] = 1 iff the Q-value range at s exceeds tol. Terminal
// states are never kept. The two-policy overload restricts the range to
// actions in the support of either policy; the single-policy overload
// considers all actions.
RelevanceMapping true_relevance(const MdpSpec& mdp, const PolicySpec& pi_e, double tol = 1e-9);
RelevanceMapping true_relevance(const MdpSpec& mdp, const PolicySpec& pi_e,
                                const PolicySpec& pi_b, double tol = 1e-9);

}  // namespace osiris
