#include "osiris/diagnostics.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "osiris/dp.hpp"
#include "osiris/estimators.hpp"
#include "osiris/parallel.hpp"
#include "osiris/rng.hpp"
#include "osiris/stats.hpp"

namespace osiris {

namespace {

constexpr int kBlocks = 100;

// Per-trajectory masked/omitted weight products and the discounted return.
struct DrawValues {
  double g = 0.0;
  double kept = 1.0;
  double omitted = 1.0;
};

DrawValues one_draw(const MdpSpec& mdp, const PolicySpec& pi_e, const PolicySpec& pi_b,
                    const RelevanceMapping& theta, std::uint64_t seed) {
  const Trajectory traj = sample_trajectory(mdp, pi_b, seed);
  DrawValues v;
  v.g = total_return(traj, mdp.gamma);
  for (int t = 0; t < traj.length(); ++t) {
    const int s = traj.states[static_cast<std::size_t>(t)];
    const int a = traj.actions[static_cast<std::size_t>(t)];
    const double ratio = likelihood_ratio(pi_e, pi_b, s, a);
    if (theta.keeps(s)) {
      v.kept *= ratio;
    } else {
      v.omitted *= ratio;
    }
  }
  return v;
}

struct BlockSums {
  std::vector<double> sums;
  long long count = 0;
};

// Splits [0, n_draws) into kBlocks index-ordered blocks and accumulates the
// per-draw moment vector within each block. Blocks run in parallel; the
// block boundaries are fixed, so results do not depend on the worker count.
std::vector<BlockSums> accumulate_blocks(
    long long n_draws, int n_moments,
    const std::function<void(long long, std::vector<double>&)>& draw_fn) {
  if (n_draws < kBlocks) {
    throw std::invalid_argument("identity checks need at least " + std::to_string(kBlocks) +
                                " draws");
  }
  std::vector<BlockSums> blocks(kBlocks);
  parallel_for_index(kBlocks, [&](long long b) {
    const long long lo = b * n_draws / kBlocks;
    const long long hi = (b + 1) * n_draws / kBlocks;
    BlockSums acc;
    acc.sums.assign(static_cast<std::size_t>(n_moments), 0.0);
    std::vector<double> m(static_cast<std::size_t>(n_moments));
    for (long long i = lo; i < hi; ++i) {
      std::fill(m.begin(), m.end(), 0.0);
      draw_fn(i, m);
      for (int j = 0; j < n_moments; ++j) acc.sums[static_cast<std::size_t>(j)] += m[static_cast<std::size_t>(j)];
      ++acc.count;
    }
    blocks[static_cast<std::size_t>(b)] = std::move(acc);
  });
  return blocks;
}

BlockSums total_of(const std::vector<BlockSums>& blocks) {
  BlockSums total;
  total.sums.assign(blocks.front().sums.size(), 0.0);
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < b.sums.size(); ++j) total.sums[j] += b.sums[j];
    total.count += b.count;
  }
  return total;
}

// Batch-means standard error of a statistic of the moment means.
double block_se(const std::vector<BlockSums>& blocks,
                const std::function<double(const BlockSums&)>& stat) {
  std::vector<double> vals;
  vals.reserve(blocks.size());
  for (const auto& b : blocks) vals.push_back(stat(b));
  const double v = sample_variance(vals);
  return std::sqrt(v / static_cast<double>(vals.size()));
}

bool identity_pass(double lhs, double rhs, double lhs_se, double rhs_se) {
  return std::abs(lhs - rhs) <=
         std::max(0.05 * std::abs(rhs), 4.0 * std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se));
}

void check_mask(const PolicySpec& pi_e, const RelevanceMapping& theta) {
  if (theta.n_states() != pi_e.n_states) {
    throw std::invalid_argument("mask size does not match the policies");
  }
}

double require_defined(double omitted) {
  if (std::isnan(omitted)) {
    throw std::domain_error("omitted factor undefined: zero behavior probability on an omitted step");
  }
  return omitted;
}

}  // namespace

IdentityCheckReport check_omitted_mean(const MdpSpec& mdp, const PolicySpec& pi_e,
                                       const PolicySpec& pi_b, const RelevanceMapping& theta,
                                       long long n_draws, std::uint64_t seed) {
  validate_policy(mdp, pi_e);
  validate_policy(mdp, pi_b);
  check_mask(pi_e, theta);
  const auto blocks = accumulate_blocks(n_draws, 2, [&](long long i, std::vector<double>& m) {
    const auto v = one_draw(mdp, pi_e, pi_b, theta, derive_stream(seed, static_cast<std::uint64_t>(i)));
    const double c = require_defined(v.omitted);
    m[0] = c;
    m[1] = c * c;
  });
  const auto total = total_of(blocks);
  const auto mean_c = [](const BlockSums& b) { return b.sums[0] / static_cast<double>(b.count); };

  IdentityCheckReport rep;
  rep.check_id = "omitted_factor_mean_one";
  rep.lhs = mean_c(total);
  rep.rhs = 1.0;
  rep.lhs_se = block_se(blocks, mean_c);
  rep.rhs_se = 0.0;
  rep.n_draws = n_draws;
  rep.seed = seed;
  rep.pass = identity_pass(rep.lhs, rep.rhs, rep.lhs_se, rep.rhs_se);
  rep.term_breakdown["var_omitted"] =
      total.sums[1] / static_cast<double>(total.count) - rep.lhs * rep.lhs;
  return rep;
}

IdentityCheckReport check_bias_identity(const MdpSpec& mdp, const PolicySpec& pi_e,
                                        const PolicySpec& pi_b, const RelevanceMapping& theta,
                                        long long n_draws, std::uint64_t seed, bool expect_bias) {
  validate_policy(mdp, pi_e);
  validate_policy(mdp, pi_b);
  check_mask(pi_e, theta);
  // Moments: [0] v, [1] c, [2] v*c, with v the masked per-trajectory value.
  const auto blocks = accumulate_blocks(n_draws, 3, [&](long long i, std::vector<double>& m) {
    const auto v = one_draw(mdp, pi_e, pi_b, theta, derive_stream(seed, static_cast<std::uint64_t>(i)));
    const double c = require_defined(v.omitted);
    const double masked = v.g * v.kept;
    m[0] = masked;
    m[1] = c;
    m[2] = masked * c;
  });
  const auto total = total_of(blocks);
  const auto lhs_stat = [](const BlockSums& b) {
    const double n = static_cast<double>(b.count);
    const double mv = b.sums[0] / n;
    const double mc = b.sums[1] / n;
    const double mvc = b.sums[2] / n;
    return mv + (mvc - mv * mc);
  };
  const auto mean_v = [](const BlockSums& b) { return b.sums[0] / static_cast<double>(b.count); };

  IdentityCheckReport rep;
  rep.check_id = expect_bias ? "bias_identity_adversarial_mask" : "bias_identity";
  rep.lhs = lhs_stat(total);
  rep.rhs = exact_policy_value(mdp, pi_e).value;
  rep.lhs_se = block_se(blocks, lhs_stat);
  rep.rhs_se = 0.0;
  rep.n_draws = n_draws;
  rep.seed = seed;
  rep.expect_bias = expect_bias;
  const double n = static_cast<double>(total.count);
  const double mv = total.sums[0] / n;
  const double mc = total.sums[1] / n;
  const double mv_se = block_se(blocks, mean_v);
  rep.term_breakdown["mean_masked"] = mv;
  rep.term_breakdown["mean_masked_se"] = mv_se;
  rep.term_breakdown["mean_omitted"] = mc;
  rep.term_breakdown["cov_masked_omitted"] = total.sums[2] / n - mv * mc;
  rep.pass = identity_pass(rep.lhs, rep.rhs, rep.lhs_se, rep.rhs_se);
  if (expect_bias) {
    const bool bias_detected = std::abs(mv - rep.rhs) > 4.0 * mv_se;
    rep.pass = rep.pass && bias_detected;
  }
  return rep;
}

IdentityCheckReport check_variance_identity(const MdpSpec& mdp, const PolicySpec& pi_e,
                                            const PolicySpec& pi_b,
                                            const RelevanceMapping& theta, long long n_draws,
                                            std::uint64_t seed) {
  validate_policy(mdp, pi_e);
  validate_policy(mdp, pi_b);
  check_mask(pi_e, theta);
  // Moments: [0] v, [1] v^2, [2] c, [3] c^2, [4] v*c, [5] v^2*c^2.
  const auto blocks = accumulate_blocks(n_draws, 6, [&](long long i, std::vector<double>& m) {
    const auto v = one_draw(mdp, pi_e, pi_b, theta, derive_stream(seed, static_cast<std::uint64_t>(i)));
    const double c = require_defined(v.omitted);
    const double masked = v.g * v.kept;
    m[0] = masked;
    m[1] = masked * masked;
    m[2] = c;
    m[3] = c * c;
    m[4] = masked * c;
    m[5] = masked * masked * c * c;
  });
  const auto total = total_of(blocks);
  const auto lhs_stat = [](const BlockSums& b) {
    const double n = static_cast<double>(b.count);
    const double m0 = b.sums[0] / n, m1 = b.sums[1] / n;
    return m1 - m0 * m0;
  };
  const auto rhs_stat = [](const BlockSums& b) {
    const double n = static_cast<double>(b.count);
    const double m0 = b.sums[0] / n, m1 = b.sums[1] / n, m2 = b.sums[2] / n;
    const double m3 = b.sums[3] / n, m4 = b.sums[4] / n, m5 = b.sums[5] / n;
    const double var_full = m5 - m4 * m4;
    const double mean_sq_gap = m4 * m4 - m0 * m0;
    const double var_c = m3 - m2 * m2;
    const double cov_sq = m5 - m1 * m3;
    return var_full + mean_sq_gap - m1 * var_c - cov_sq;
  };

  IdentityCheckReport rep;
  rep.check_id = "variance_identity";
  rep.lhs = lhs_stat(total);
  rep.rhs = rhs_stat(total);
  rep.lhs_se = block_se(blocks, lhs_stat);
  rep.rhs_se = block_se(blocks, rhs_stat);
  rep.n_draws = n_draws;
  rep.seed = seed;
  rep.pass = identity_pass(rep.lhs, rep.rhs, rep.lhs_se, rep.rhs_se);
  const double n = static_cast<double>(total.count);
  const double m0 = total.sums[0] / n, m1 = total.sums[1] / n, m2 = total.sums[2] / n;
  const double m3 = total.sums[3] / n, m4 = total.sums[4] / n, m5 = total.sums[5] / n;
  rep.term_breakdown["var_full"] = m5 - m4 * m4;
  rep.term_breakdown["mean_sq_gap"] = m4 * m4 - m0 * m0;
  rep.term_breakdown["scale_term"] = m1 * (m3 - m2 * m2);
  rep.term_breakdown["cov_term"] = m5 - m1 * m3;
  rep.term_breakdown["mean_masked"] = m0;
  rep.term_breakdown["mean_full"] = m4;
  return rep;
}

IdentityCheckReport check_length_propositions(const MdpSpec& mdp, const PolicySpec& pi_e,
                                              const PolicySpec& pi_b,
                                              const std::vector<RelevanceMapping>& nested_masks,
                                              long long n_draws, std::uint64_t seed) {
  validate_policy(mdp, pi_e);
  validate_policy(mdp, pi_b);
  if (pi_e.prob == pi_b.prob) {
    throw std::invalid_argument(
        "check_length_propositions: pi_e and pi_b are identical, every weight is 1");
  }
  if (nested_masks.size() < 2) {
    throw std::invalid_argument("check_length_propositions: need at least two masks");
  }
  const int n_masks = static_cast<int>(nested_masks.size());
  for (int k = 0; k < n_masks; ++k) {
    check_mask(pi_e, nested_masks[static_cast<std::size_t>(k)]);
    if (k == 0) continue;
    for (int s = 0; s < pi_e.n_states; ++s) {
      if (nested_masks[static_cast<std::size_t>(k - 1)].keeps(s) &&
          !nested_masks[static_cast<std::size_t>(k)].keeps(s)) {
        throw std::invalid_argument("check_length_propositions: masks are not nested");
      }
    }
  }

  // Per mask k: [4k] w, [4k+1] w^2, [4k+2] log w over non-zero weights,
  // [4k+3] count of non-zero weights.
  const int n_moments = 4 * n_masks;
  const auto blocks = accumulate_blocks(n_draws, n_moments, [&](long long i, std::vector<double>& m) {
    const Trajectory traj =
        sample_trajectory(mdp, pi_b, derive_stream(seed, static_cast<std::uint64_t>(i)));
    for (int k = 0; k < n_masks; ++k) {
      double w = 1.0;
      for (int t = 0; t < traj.length(); ++t) {
        const int s = traj.states[static_cast<std::size_t>(t)];
        if (!nested_masks[static_cast<std::size_t>(k)].keeps(s)) continue;
        w *= likelihood_ratio(pi_e, pi_b, s, traj.actions[static_cast<std::size_t>(t)]);
      }
      m[static_cast<std::size_t>(4 * k)] = w;
      m[static_cast<std::size_t>(4 * k + 1)] = w * w;
      if (w > 0.0) {
        m[static_cast<std::size_t>(4 * k + 2)] = std::log(w);
        m[static_cast<std::size_t>(4 * k + 3)] = 1.0;
      }
    }
  });
  const auto total = total_of(blocks);

  IdentityCheckReport rep;
  rep.check_id = "weight_length_propositions";
  rep.n_draws = n_draws;
  rep.seed = seed;
  double zero_weights = 0.0;
  for (int k = 0; k < n_masks; ++k) {
    zero_weights += static_cast<double>(total.count) - total.sums[static_cast<std::size_t>(4 * k + 3)];
  }
  rep.term_breakdown["zero_weights"] = zero_weights;

  std::vector<double> var_k(static_cast<std::size_t>(n_masks));
  std::vector<double> var_se_k(static_cast<std::size_t>(n_masks));
  std::vector<double> logmean_k(static_cast<std::size_t>(n_masks));
  std::vector<double> logmean_se_k(static_cast<std::size_t>(n_masks));
  for (int k = 0; k < n_masks; ++k) {
    const auto var_stat = [k](const BlockSums& b) {
      const double n = static_cast<double>(b.count);
      const double mw = b.sums[static_cast<std::size_t>(4 * k)] / n;
      return b.sums[static_cast<std::size_t>(4 * k + 1)] / n - mw * mw;
    };
    const auto log_stat = [k](const BlockSums& b) {
      const double nz = b.sums[static_cast<std::size_t>(4 * k + 3)];
      return nz > 0.0 ? b.sums[static_cast<std::size_t>(4 * k + 2)] / nz : 0.0;
    };
    var_k[static_cast<std::size_t>(k)] = var_stat(total);
    var_se_k[static_cast<std::size_t>(k)] = block_se(blocks, var_stat);
    logmean_k[static_cast<std::size_t>(k)] = log_stat(total);
    logmean_se_k[static_cast<std::size_t>(k)] = block_se(blocks, log_stat);
    rep.term_breakdown["kept_" + std::to_string(k)] =
        nested_masks[static_cast<std::size_t>(k)].count_kept();
    rep.term_breakdown["var_" + std::to_string(k)] = var_k[static_cast<std::size_t>(k)];
    rep.term_breakdown["var_se_" + std::to_string(k)] = var_se_k[static_cast<std::size_t>(k)];
    rep.term_breakdown["logmean_" + std::to_string(k)] = logmean_k[static_cast<std::size_t>(k)];
    rep.term_breakdown["logmean_se_" + std::to_string(k)] =
        logmean_se_k[static_cast<std::size_t>(k)];
  }

  bool pass = zero_weights == 0.0;
  for (int k = 1; k < n_masks; ++k) {
    const double sep_var = 4.0 * std::sqrt(var_se_k[static_cast<std::size_t>(k)] * var_se_k[static_cast<std::size_t>(k)] +
                                           var_se_k[static_cast<std::size_t>(k - 1)] * var_se_k[static_cast<std::size_t>(k - 1)]);
    const double sep_log = 4.0 * std::sqrt(logmean_se_k[static_cast<std::size_t>(k)] * logmean_se_k[static_cast<std::size_t>(k)] +
                                           logmean_se_k[static_cast<std::size_t>(k - 1)] * logmean_se_k[static_cast<std::size_t>(k - 1)]);
    if (!(var_k[static_cast<std::size_t>(k)] - var_k[static_cast<std::size_t>(k - 1)] > sep_var)) pass = false;
    if (!(logmean_k[static_cast<std::size_t>(k - 1)] - logmean_k[static_cast<std::size_t>(k)] > sep_log)) pass = false;
  }
  rep.lhs = var_k.back();
  rep.rhs = var_k.front();
  rep.lhs_se = var_se_k.back();
  rep.rhs_se = var_se_k.front();
  rep.pass = pass;
  return rep;
}

CorrelationReport weight_length_analysis(const MdpSpec& mdp, const PolicySpec& pi_e,
                                         const PolicySpec& pi_b,
                                         const std::vector<double>& alphas, int n_trials,
                                         int batch_size, const RelevanceConfig& cfg,
                                         std::uint64_t seed) {
  validate_policy(mdp, pi_e);
  validate_policy(mdp, pi_b);
  if (n_trials < 1 || batch_size < 1) {
    throw std::invalid_argument("weight_length_analysis: n_trials and batch_size must be positive");
  }
  struct TrialOut {
    std::vector<double> lengths;
    std::vector<double> full_weights;
    std::vector<std::vector<double>> masked_weights;  // per alpha
  };
  std::vector<TrialOut> per_trial(static_cast<std::size_t>(n_trials));
  parallel_for_index(n_trials, [&](long long tr) {
    const auto batch =
        sample_batch(mdp, pi_b, batch_size, derive_stream(seed, static_cast<std::uint64_t>(tr)));
    TrialOut out;
    const auto full = is_estimate(batch, pi_e, pi_b, mdp.gamma);
    out.full_weights = full.per_traj_weight;
    for (const auto& traj : batch.trajectories) {
      out.lengths.push_back(static_cast<double>(traj.length()));
    }
    for (double a : alphas) {
      RelevanceConfig c = cfg;
      c.alpha = a;
      const auto mask = estimate_relevance_map(batch, pi_e, pi_b, mdp.gamma, c);
      const auto rep = osiris_estimate(batch, {pi_e, pi_b, mask}, mdp.gamma);
      out.masked_weights.push_back(rep.per_traj_weight);
    }
    per_trial[static_cast<std::size_t>(tr)] = std::move(out);
  });

  CorrelationReport rep;
  rep.n_trials = n_trials;
  rep.batch_size = batch_size;
  rep.seed = seed;
  std::vector<double> lengths, log_weights;
  std::vector<std::vector<double>> pooled(alphas.size());
  for (const auto& t : per_trial) {
    for (std::size_t i = 0; i < t.full_weights.size(); ++i) {
      const double w = t.full_weights[i];
      if (w > 0.0) {
        lengths.push_back(t.lengths[i]);
        log_weights.push_back(std::log(w));
      } else {
        ++rep.n_zero_weight_excluded;
      }
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      pooled[a].insert(pooled[a].end(), t.masked_weights[a].begin(), t.masked_weights[a].end());
    }
  }
  rep.n_points = static_cast<long long>(lengths.size());
  rep.pearson_log_weight_length = pearson_r(lengths, log_weights);
  rep.degenerate = std::isnan(rep.pearson_log_weight_length);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    rep.weight_variance_by_alpha[alphas[a]] = sample_variance(pooled[a]);
    rep.weight_mean_by_alpha[alphas[a]] = mean_of(pooled[a]);
  }
  return rep;
}

}  // namespace osiris
