#include "osiris/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "osiris/estimators.hpp"

namespace osiris {

SampleSplit collect_split(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                          const PolicySpec& pi_b, double gamma, int state, PartitionKind kind) {
  if (state < 0 || state >= pi_e.n_states) {
    throw std::invalid_argument("collect_split: state out of range");
  }
  double mean_return = 0.0;
  if (kind == PartitionKind::return_binary) {
    double sum = 0.0;
    for (const auto& traj : batch.trajectories) sum += total_return(traj, gamma);
    mean_return = batch.size() > 0 ? sum / batch.size() : 0.0;
  }

  SampleSplit split;
  std::vector<double> rho, wtg, gtg;
  for (const auto& traj : batch.trajectories) {
    const auto len = static_cast<std::size_t>(traj.length());
    bool visits_state = false;
    for (std::size_t t = 0; t < len; ++t) {
      if (traj.states[t] == state) {
        visits_state = true;
        break;
      }
    }
    if (!visits_state) continue;

    rho.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
      rho[t] = likelihood_ratio(pi_e, pi_b, traj.states[t], traj.actions[t]);
    }
    // Suffix products/returns: wtg[t] = prod_{u>=t} rho[u], gtg[t] = g_{t:T}.
    wtg.assign(len + 1, 1.0);
    gtg.assign(len + 1, 0.0);
    for (std::size_t t = len; t-- > 0;) {
      wtg[t] = rho[t] * wtg[t + 1];
      gtg[t] = traj.rewards[t] + gamma * gtg[t + 1];
    }
    const double g_total = gtg[0];
    for (std::size_t t = 0; t < len; ++t) {
      if (traj.states[t] != state) continue;
      ++split.n_visits;
      const double value = gtg[t] * wtg[t];
      const bool side_a = kind == PartitionKind::ratio_binary ? rho[t] > 1.0
                                                              : g_total > mean_return;
      (side_a ? split.side_a : split.side_b).push_back(value);
    }
  }
  return split;
}

RelevanceDecision estimate_relevance(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                                     const PolicySpec& pi_b, double gamma, int state,
                                     const RelevanceConfig& cfg) {
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) {
    throw std::invalid_argument("estimate_relevance: alpha must lie in [0, 1]");
  }
  if (cfg.min_samples_per_side < 2) {
    throw std::invalid_argument("estimate_relevance: min_samples_per_side must be at least 2");
  }
  RelevanceDecision dec;
  const auto split = collect_split(batch, pi_e, pi_b, gamma, state, cfg.partition);
  dec.n_visits = split.n_visits;
  if (cfg.alpha == 0.0) return dec;
  if (cfg.alpha == 1.0) {
    dec.theta = split.n_visits > 0 ? 1 : 0;
    return dec;
  }
  if (static_cast<int>(split.side_a.size()) < cfg.min_samples_per_side ||
      static_cast<int>(split.side_b.size()) < cfg.min_samples_per_side) {
    dec.test.inconclusive = true;
    dec.test.n_a = static_cast<int>(split.side_a.size());
    dec.test.n_b = static_cast<int>(split.side_b.size());
    return dec;
  }
  dec.test = cfg.test == TestKind::welch ? welch_t_test(split.side_a, split.side_b, cfg.alpha)
                                         : smirnov_test(split.side_a, split.side_b, cfg.alpha);
  dec.tested = true;
  dec.theta = dec.test.reject ? 1 : 0;
  return dec;
}

RelevanceMapping estimate_relevance_map(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                                        const PolicySpec& pi_b, double gamma,
                                        const RelevanceConfig& cfg) {
  RelevanceMapping mask = RelevanceMapping::no_states(pi_e.n_states);
  for (int s = 0; s < pi_e.n_states; ++s) {
    mask.keep[static_cast<std::size_t>(s)] =
        static_cast<std::uint8_t>(estimate_relevance(batch, pi_e, pi_b, gamma, s, cfg).theta);
  }
  return mask;
}

DiscretizeResult discretize(const std::vector<std::vector<double>>& points,
                            const std::vector<int>& bins_per_dim) {
  if (points.empty()) throw std::invalid_argument("discretize: no points");
  const std::size_t dims = bins_per_dim.size();
  if (dims == 0) throw std::invalid_argument("discretize: no dimensions");
  for (int b : bins_per_dim) {
    if (b < 1) throw std::invalid_argument("discretize: each dimension needs at least one bin");
  }
  for (const auto& p : points) {
    if (p.size() != dims) throw std::invalid_argument("discretize: point dimension mismatch");
    for (double v : p) {
      if (!std::isfinite(v)) throw std::invalid_argument("discretize: non-finite coordinate");
    }
  }

  DiscretizeResult out;
  std::vector<double> lo(dims), hi(dims);
  std::vector<int> bins(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    lo[d] = hi[d] = points[0][d];
    for (const auto& p : points) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
    bins[d] = hi[d] > lo[d] ? bins_per_dim[d] : 1;
    std::vector<double> edges(static_cast<std::size_t>(bins[d]) + 1);
    for (int k = 0; k <= bins[d]; ++k) {
      edges[static_cast<std::size_t>(k)] = lo[d] + (hi[d] - lo[d]) * k / bins[d];
    }
    out.edges.push_back(std::move(edges));
  }
  long long cells = 1;
  for (std::size_t d = 0; d < dims; ++d) cells *= bins[d];
  if (cells > (1LL << 30)) throw std::invalid_argument("discretize: too many cells");
  out.n_cells = static_cast<int>(cells);

  out.codes.reserve(points.size());
  for (const auto& p : points) {
    long long code = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      int idx = 0;
      if (bins[d] > 1) {
        idx = static_cast<int>((p[d] - lo[d]) / (hi[d] - lo[d]) * bins[d]);
        idx = std::clamp(idx, 0, bins[d] - 1);  // closes the top edge
      }
      code = code * bins[d] + idx;
    }
    out.codes.push_back(static_cast<int>(code));
  }
  return out;
}

}  // namespace osiris
