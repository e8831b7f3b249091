#include "osiris/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace osiris {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_step(const PolicySpec& pi, int s, int a) {
  if (s < 0 || s >= pi.n_states || a < 0 || a >= pi.n_actions) {
    throw std::invalid_argument("trajectory step (s=" + std::to_string(s) +
                                ", a=" + std::to_string(a) +
                                ") is outside the policy's state/action space");
  }
}

void check_batch(const TrajectoryBatch& batch, const std::string& who) {
  if (batch.size() == 0) throw std::invalid_argument(who + ": empty batch");
}

void check_policy_pair(const PolicySpec& pi_e, const PolicySpec& pi_b) {
  if (pi_e.n_states != pi_b.n_states || pi_e.n_actions != pi_b.n_actions) {
    throw std::invalid_argument("policy shapes differ between pi_e and pi_b");
  }
}

// Kept and omitted factor products of one trajectory. Kept factors must be
// well defined (throws on zero behavior probability); a zero behavior
// probability in an omitted factor only poisons the omitted product.
struct SplitWeight {
  double kept = 1.0;
  double omitted = 1.0;
  int kept_steps = 0;
};

SplitWeight split_weight(const Trajectory& traj, const PolicySpec& pi_e, const PolicySpec& pi_b,
                         const RelevanceMapping& theta) {
  SplitWeight w;
  bool omitted_defined = true;
  for (int t = 0; t < traj.length(); ++t) {
    const int s = traj.states[static_cast<std::size_t>(t)];
    const int a = traj.actions[static_cast<std::size_t>(t)];
    check_step(pi_e, s, a);
    if (theta.keeps(s)) {
      w.kept *= likelihood_ratio(pi_e, pi_b, s, a);
      ++w.kept_steps;
    } else {
      const double pb = pi_b.at(s, a);
      if (pb == 0.0) {
        omitted_defined = false;
      } else if (omitted_defined) {
        w.omitted *= pi_e.at(s, a) / pb;
      }
    }
  }
  if (!omitted_defined) w.omitted = kNan;
  return w;
}

EstimatorReport weighted_report(const std::string& id, const TrajectoryBatch& batch,
                                const WeightConfig& cfg, double gamma, bool self_normalized) {
  check_batch(batch, id);
  check_policy_pair(cfg.pi_e, cfg.pi_b);
  if (cfg.theta.n_states() != cfg.pi_e.n_states) {
    throw std::invalid_argument(id + ": mask size does not match the policies");
  }
  EstimatorReport rep;
  rep.estimator_id = id;
  rep.n_trajectories = batch.size();
  double sum_wg = 0.0;
  double sum_w = 0.0;
  for (const auto& traj : batch.trajectories) {
    const auto w = split_weight(traj, cfg.pi_e, cfg.pi_b, cfg.theta);
    const double g = total_return(traj, gamma);
    rep.per_traj_weight.push_back(w.kept);
    rep.per_traj_return.push_back(g);
    rep.per_traj_omitted_weight.push_back(w.omitted);
    rep.effective_length.push_back(w.kept_steps);
    sum_wg += w.kept * g;
    sum_w += w.kept;
  }
  if (self_normalized) {
    if (sum_w == 0.0) {
      throw std::domain_error(id + ": every importance weight is zero, "
                                   "the self-normalized estimate is undefined");
    }
    rep.estimate = sum_wg / sum_w;
  } else {
    rep.estimate = sum_wg / static_cast<double>(batch.size());
  }
  return rep;
}

}  // namespace

double likelihood_ratio(const PolicySpec& pi_e, const PolicySpec& pi_b, int s, int a) {
  check_step(pi_e, s, a);
  check_step(pi_b, s, a);
  const double pb = pi_b.at(s, a);
  const double pe = pi_e.at(s, a);
  if (pb == 0.0) {
    if (pe > 0.0) {
      throw std::domain_error("behavior policy has zero probability for observed action (s=" +
                              std::to_string(s) + ", a=" + std::to_string(a) +
                              ") inside the evaluation policy's support");
    }
    throw std::domain_error("observed action (s=" + std::to_string(s) + ", a=" +
                            std::to_string(a) + ") has zero probability under both policies");
  }
  return pe / pb;
}

EstimatorReport mc_estimate(const TrajectoryBatch& batch, double gamma) {
  check_batch(batch, "mc");
  EstimatorReport rep;
  rep.estimator_id = "mc";
  rep.n_trajectories = batch.size();
  double sum = 0.0;
  for (const auto& traj : batch.trajectories) {
    const double g = total_return(traj, gamma);
    rep.per_traj_weight.push_back(1.0);
    rep.per_traj_return.push_back(g);
    rep.per_traj_omitted_weight.push_back(1.0);
    rep.effective_length.push_back(traj.length());
    sum += g;
  }
  rep.estimate = sum / static_cast<double>(batch.size());
  return rep;
}

EstimatorReport is_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                            const PolicySpec& pi_b, double gamma) {
  return weighted_report("is", batch,
                         {pi_e, pi_b, RelevanceMapping::all_states(pi_e.n_states)}, gamma,
                         /*self_normalized=*/false);
}

EstimatorReport wis_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                             const PolicySpec& pi_b, double gamma) {
  return weighted_report("wis", batch,
                         {pi_e, pi_b, RelevanceMapping::all_states(pi_e.n_states)}, gamma,
                         /*self_normalized=*/true);
}

EstimatorReport osiris_estimate(const TrajectoryBatch& batch, const WeightConfig& cfg,
                                double gamma) {
  return weighted_report("osiris", batch, cfg, gamma, /*self_normalized=*/false);
}

EstimatorReport osirwis_estimate(const TrajectoryBatch& batch, const WeightConfig& cfg,
                                 double gamma) {
  return weighted_report("osirwis", batch, cfg, gamma, /*self_normalized=*/true);
}

EstimatorReport stepwise_osiris_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                                         const PolicySpec& pi_b,
                                         const TimedRelevanceMapping& theta, double gamma) {
  check_batch(batch, "stepwise_osiris");
  check_policy_pair(pi_e, pi_b);
  if (theta.n_states != pi_e.n_states) {
    throw std::invalid_argument("stepwise_osiris: mask size does not match the policies");
  }
  EstimatorReport rep;
  rep.estimator_id = "stepwise_osiris";
  rep.n_trajectories = batch.size();
  double sum = 0.0;
  std::vector<double> rho;
  for (const auto& traj : batch.trajectories) {
    const int len = traj.length();
    // Ratios are evaluated lazily: a step with zero behavior probability is
    // an error only if some reward's weight actually uses that step.
    rho.assign(static_cast<std::size_t>(len), kNan);
    double summand = 0.0;
    double discount = 1.0;
    for (int tr = 0; tr < len; ++tr) {
      double w = 1.0;
      for (int t = 0; t < len; ++t) {
        const int s = traj.states[static_cast<std::size_t>(t)];
        if (!theta.keeps(s, static_cast<long long>(tr) - t)) continue;
        if (std::isnan(rho[static_cast<std::size_t>(t)])) {
          rho[static_cast<std::size_t>(t)] =
              likelihood_ratio(pi_e, pi_b, s, traj.actions[static_cast<std::size_t>(t)]);
        }
        w *= rho[static_cast<std::size_t>(t)];
      }
      summand += discount * traj.rewards[static_cast<std::size_t>(tr)] * w;
      discount *= gamma;
    }
    rep.per_traj_weight.push_back(summand);
    rep.per_traj_return.push_back(total_return(traj, gamma));
    rep.effective_length.push_back(len);
    sum += summand;
  }
  rep.estimate = sum / static_cast<double>(batch.size());
  return rep;
}

EstimatorReport pdis_estimate(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                              const PolicySpec& pi_b, double gamma) {
  auto rep = stepwise_osiris_estimate(batch, pi_e, pi_b,
                                      TimedRelevanceMapping::per_decision(pi_e.n_states), gamma);
  rep.estimator_id = "pdis";
  return rep;
}

}  // namespace osiris
