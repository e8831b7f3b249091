#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "osiris/mdp.hpp"
#include "osiris/relevance.hpp"

namespace osiris {

// Result of one Monte Carlo identity check. lhs is the estimated quantity,
// rhs the value it must match. Standard errors come from 100 index-ordered
// draw blocks (batch means), so they are independent of the worker count.
// The check passes when |lhs - rhs| <= max(0.05 |rhs|, 4 sqrt(lhs_se^2 +
// rhs_se^2)). With expect_bias set, the check instead demands that the
// unweighted estimate is detectably biased while the corrected lhs still
// matches rhs.
struct IdentityCheckReport {
  std::string check_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  long long n_draws = 0;
  std::uint64_t seed = 0;
  bool expect_bias = false;
  bool pass = false;
  std::map<std::string, double> term_breakdown;
};

// Pooled weight/length analysis over repeated batches. For each alpha the
// mask is re-estimated per batch and the per-trajectory weights are pooled
// across all batches; the correlation is computed at alpha = 1 between
// episode length and log weight, excluding zero weights.
struct CorrelationReport {
  long long n_points = 0;
  long long n_zero_weight_excluded = 0;
  double pearson_log_weight_length = 0.0;
  bool degenerate = false;  // too few usable points or a constant side
  int n_trials = 0;
  int batch_size = 0;
  std::uint64_t seed = 0;
  std::map<double, double> weight_variance_by_alpha;
  std::map<double, double> weight_mean_by_alpha;
};

// Mean of the omitted-factor product over trajectories from pi_b must be 1
// for any fixed mask. Draws n_draws independent trajectories.
IdentityCheckReport check_omitted_mean(const MdpSpec& mdp, const PolicySpec& pi_e,
                                       const PolicySpec& pi_b, const RelevanceMapping& theta,
                                       long long n_draws, std::uint64_t seed);

// The masked estimate plus the covariance between it and the omitted factor
// must equal the true value of pi_e:
//   E[v_masked] + Cov(v_masked, omitted) = V(pi_e)
// for any fixed mask, even one that omits genuinely relevant states. With
// expect_bias, additionally requires E[v_masked] alone to miss V(pi_e) by
// more than 4 standard errors.
IdentityCheckReport check_bias_identity(const MdpSpec& mdp, const PolicySpec& pi_e,
                                        const PolicySpec& pi_b, const RelevanceMapping& theta,
                                        long long n_draws, std::uint64_t seed,
                                        bool expect_bias = false);

// Single-trajectory variance decomposition,
//   Var[v_masked] = Var[v_full] + (E[v_full]^2 - E[v_masked]^2)
//                   - E[v_masked^2] Var[omitted] - Cov(v_masked^2, omitted^2),
// which requires finite fourth moments of the full weight; use an MDP whose
// weights are bounded.
IdentityCheckReport check_variance_identity(const MdpSpec& mdp, const PolicySpec& pi_e,
                                            const PolicySpec& pi_b,
                                            const RelevanceMapping& theta, long long n_draws,
                                            std::uint64_t seed);

// For nested masks S_0 subset S_1 subset ... the variance of the kept weight
// is non-decreasing and the mean log kept weight is non-increasing in the
// mask. Requires strictly monotone sample chains separated by 4 combined
// standard errors. Throws if pi_e and pi_b are identical (every ratio is 1
// and the comparison is vacuous). The breakdown holds var_k / log_mean_k and
// their standard errors per mask.
IdentityCheckReport check_length_propositions(const MdpSpec& mdp, const PolicySpec& pi_e,
                                              const PolicySpec& pi_b,
                                              const std::vector<RelevanceMapping>& nested_masks,
                                              long long n_draws, std::uint64_t seed);

// n_trials independent batches of batch_size trajectories from pi_b. For
// each alpha in alphas, re-estimates the mask on every batch with cfg at
// that alpha and pools the per-trajectory masked weights.
CorrelationReport weight_length_analysis(const MdpSpec& mdp, const PolicySpec& pi_e,
                                         const PolicySpec& pi_b,
                                         const std::vector<double>& alphas, int n_trials,
                                         int batch_size, const RelevanceConfig& cfg,
                                         std::uint64_t seed);

}  // namespace osiris
