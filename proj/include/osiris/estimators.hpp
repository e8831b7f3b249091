#pragma once

#include <string>
#include <vector>

#include "osiris/mdp.hpp"

namespace osiris {

// Everything needed to turn a logged trajectory into importance weights:
// the evaluation policy whose value is wanted, the behavior policy that
// generated the data, and the per-state keep/omit mask.
struct WeightConfig {
  PolicySpec pi_e;
  PolicySpec pi_b;
  RelevanceMapping theta;
};

// pi_e(a|s) / pi_b(a|s). Throws std::domain_error when pi_b(a|s) = 0: the
// observed pair is then impossible under the behavior policy, and the ratio
// is undefined. The message names the offending (s, a).
double likelihood_ratio(const PolicySpec& pi_e, const PolicySpec& pi_b, int s, int a);

// Output of every estimator. Vectors are indexed by trajectory.
//
//   per_traj_weight     full-trajectory weight for whole-trajectory
//                       estimators; for per-reward estimators it holds the
//                       trajectory's summed per-reward contribution.
//   per_traj_return     discounted return of the trajectory.
//   per_traj_omitted_weight
//                       product of the ratio factors the mask dropped, so
//                       weight * omitted = the full importance weight.
//                       NaN when a dropped factor divides by zero behavior
//                       probability; empty for per-reward estimators, where
//                       no single per-trajectory split exists.
//   effective_length    number of steps whose factor was kept (episode
//                       length for per-reward estimators).
struct EstimatorReport {
  std::string estimator_id;
  double estimate = 0.0;
  int n_trajectories = 0;
  std::vector<double> per_traj_weight;
  std::vector<double> per_traj_return;
  std::vector<double> per_traj_omitted_weight;
  std::vector<int> effective_length;
};

// On-policy Monte Carlo: mean discounted return, unit weights.
EstimatorReport mc_estimate(const TrajectoryBatch& batch, double gamma);

// Full-trajectory importance sampling and its self-normalized variant.
EstimatorReport is_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                            const PolicySpec& pi_b, double gamma);
EstimatorReport wis_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                             const PolicySpec& pi_b, double gamma);

// Importance sampling that keeps only the ratio factors of states the mask
// retains, plain and self-normalized. With theta = all states these match
// is/wis exactly, factor for factor.
EstimatorReport osiris_estimate(const TrajectoryBatch& batch, const WeightConfig& cfg,
                                double gamma);
EstimatorReport osirwis_estimate(const TrajectoryBatch& batch, const WeightConfig& cfg,
                                 double gamma);

// Per-reward weighting: reward at step t' is weighted by the product of the
// ratio factors of every step t with theta.keeps(s_t, t' - t).
EstimatorReport stepwise_osiris_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                                         const PolicySpec& pi_b,
                                         const TimedRelevanceMapping& theta, double gamma);

// Per-decision importance sampling: stepwise weighting with the mask that
// keeps every visit at or before the reward.
EstimatorReport pdis_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                              const PolicySpec& pi_b, double gamma);

}  // namespace osiris
