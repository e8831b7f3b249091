// Acceptance harness: runs the toolkit's end-to-end checks and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "osiris/diagnostics.hpp"
#include "osiris/dp.hpp"
#include "osiris/estimators.hpp"
#include "osiris/experiments.hpp"
#include "osiris/gridworld.hpp"
#include "osiris/relevance.hpp"
#include "osiris/rng.hpp"
#include "osiris/stats.hpp"
#include "osiris/synthetic.hpp"

using namespace osiris;
namespace fs = std::filesystem;

namespace {

std::string str(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// Small random MDP with full-support random policies, for exact-identity
// checks. The last state is absorbing.
struct RandomCase {
  MdpSpec mdp;
  PolicySpec pi_e;
  PolicySpec pi_b;
};

RandomCase random_case(std::uint64_t seed, int n_states, int n_actions, double gamma,
                       int t_max) {
  SplitMix64 rng(seed);
  MdpSpec m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.t_max = t_max;
  m.initial_dist.assign(static_cast<std::size_t>(n_states), 0.0);
  m.initial_dist[0] = 1.0;
  m.terminal.assign(static_cast<std::size_t>(n_states), 0);
  m.terminal[static_cast<std::size_t>(n_states - 1)] = 1;
  m.transition.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
  m.reward.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      if (m.is_terminal(s)) {
        m.p(s, a, s) = 1.0;
        continue;
      }
      double total = 0.0;
      std::vector<double> w(static_cast<std::size_t>(n_states));
      for (int s2 = 0; s2 < n_states; ++s2) {
        w[static_cast<std::size_t>(s2)] = rng.next_double() + 0.05;
        total += w[static_cast<std::size_t>(s2)];
      }
      for (int s2 = 0; s2 < n_states; ++s2) m.p(s, a, s2) = w[static_cast<std::size_t>(s2)] / total;
      m.r(s, a) = 2.0 * rng.next_double() - 1.0;
    }
  }
  auto random_policy = [&]() {
    PolicySpec pi;
    pi.n_states = n_states;
    pi.n_actions = n_actions;
    pi.prob.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
    for (int s = 0; s < n_states; ++s) {
      double total = 0.0;
      std::vector<double> w(static_cast<std::size_t>(n_actions));
      for (int a = 0; a < n_actions; ++a) {
        w[static_cast<std::size_t>(a)] = rng.next_double() + 0.05;
        total += w[static_cast<std::size_t>(a)];
      }
      for (int a = 0; a < n_actions; ++a) pi.at(s, a) = w[static_cast<std::size_t>(a)] / total;
    }
    return pi;
  };
  RandomCase c;
  c.mdp = std::move(m);
  c.pi_e = random_policy();
  c.pi_b = random_policy();
  validate_mdp(c.mdp);
  return c;
}

RelevanceMapping keep_only(int n_states, const std::vector<int>& states) {
  RelevanceMapping m = RelevanceMapping::no_states(n_states);
  for (int s : states) m.keep[static_cast<std::size_t>(s)] = 1;
  return m;
}

const SummaryRow& summary_row(const BenchResult& res, int batch_size, double alpha,
                              const std::string& estimator) {
  for (const auto& r : res.summary) {
    if (r.batch_size == batch_size && r.alpha == alpha && r.estimator == estimator) return r;
  }
  throw std::logic_error("summary row not found: " + estimator);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- criteria ----

bool estimator_reductions(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed : {101, 202, 303, 404, 505}) {
    const auto c = random_case(seed, 4, 3, 0.9, 8);
    const auto batch = sample_batch(c.mdp, c.pi_b, 40, derive_stream(seed, 9));
    const auto rep_is = is_estimate(batch, c.pi_e, c.pi_b, c.mdp.gamma);
    const auto rep_wis = wis_estimate(batch, c.pi_e, c.pi_b, c.mdp.gamma);
    const WeightConfig all{c.pi_e, c.pi_b, RelevanceMapping::all_states(4)};
    const WeightConfig none{c.pi_e, c.pi_b, RelevanceMapping::no_states(4)};
    const auto os_all = osiris_estimate(batch, all, c.mdp.gamma);
    const auto ow_all = osirwis_estimate(batch, all, c.mdp.gamma);
    const auto os_none = osiris_estimate(batch, none, c.mdp.gamma);

    for (int i = 0; i < batch.size(); ++i) {
      worst = std::max(worst, std::abs(os_all.per_traj_weight[static_cast<std::size_t>(i)] -
                                       rep_is.per_traj_weight[static_cast<std::size_t>(i)]));
      worst = std::max(worst, std::abs(os_none.per_traj_weight[static_cast<std::size_t>(i)] - 1.0));
    }
    worst = std::max(worst, std::abs(os_all.estimate - rep_is.estimate));
    worst = std::max(worst, std::abs(ow_all.estimate - rep_wis.estimate));
    worst = std::max(worst, std::abs(os_none.estimate - mean_of(os_none.per_traj_return)));

    const auto timed = TimedRelevanceMapping::per_decision(4);
    const auto sw = stepwise_osiris_estimate(batch, c.pi_e, c.pi_b, timed, c.mdp.gamma);
    const auto pd = pdis_estimate(batch, c.pi_e, c.pi_b, c.mdp.gamma);
    worst = std::max(worst, std::abs(sw.estimate - pd.estimate));
    for (int i = 0; i < batch.size(); ++i) {
      worst = std::max(worst, std::abs(sw.per_traj_weight[static_cast<std::size_t>(i)] -
                                       pd.per_traj_weight[static_cast<std::size_t>(i)]));
    }
  }
  detail = str("max deviation %.3g over 5 random MDPs (tol 1e-12)", worst);
  return worst <= 1e-12;
}

bool composite_policy_value(std::string& detail) {
  double worst = 0.0;
  for (const char* name : {"dilly_dallying", "express"}) {
    const auto env = resolve_environment(name);
    const auto mask = true_relevance(env.mdp, env.pi_e, env.pi_b);
    const auto mixed = composite_policy(env.pi_e, env.pi_b, mask);
    worst = std::max(worst, std::abs(exact_policy_value(env.mdp, mixed).value -
                                     exact_policy_value(env.mdp, env.pi_e).value));
  }
  for (int k = 0; k < 20; ++k) {
    auto c = random_case(9000 + static_cast<std::uint64_t>(k), 5, 3, 0.9, 30);
    // Make states 1 and 3 irrelevant by construction: every action behaves
    // like action 0 there.
    for (int s : {1, 3}) {
      for (int a = 1; a < 3; ++a) {
        for (int s2 = 0; s2 < 5; ++s2) c.mdp.p(s, a, s2) = c.mdp.p(s, 0, s2);
        c.mdp.r(s, a) = c.mdp.r(s, 0);
      }
    }
    const auto mask = keep_only(5, {0, 2, 4});
    const auto mixed = composite_policy(c.pi_e, c.pi_b, mask);
    worst = std::max(worst, std::abs(exact_policy_value(c.mdp, mixed).value -
                                     exact_policy_value(c.mdp, c.pi_e).value));
  }
  detail = str("max |V(composite) - V(pi_e)| = %.3g (tol 1e-8)", worst);
  return worst <= 1e-8;
}

bool omitted_factor_mean(std::string& detail) {
  const auto env = resolve_environment("dilly_dallying");
  const auto mask = true_relevance(env.mdp, env.pi_e, env.pi_b);
  const auto rep = check_omitted_mean(env.mdp, env.pi_e, env.pi_b, mask, 200000, 8881);
  detail = str("mean = %.5f, se = %.5f (need within 4 se of 1)", rep.lhs, rep.lhs_se);
  return std::abs(rep.lhs - 1.0) <= 4.0 * rep.lhs_se;
}

bool exact_mask_unbiasedness(std::string& detail) {
  const auto env = resolve_environment("dilly_dallying");
  const auto mask = true_relevance(env.mdp, env.pi_e, env.pi_b);
  const auto good = check_bias_identity(env.mdp, env.pi_e, env.pi_b, mask, 100000, 8882);
  const double mean = good.term_breakdown.at("mean_masked");
  const double se = good.term_breakdown.at("mean_masked_se");
  const bool unbiased = std::abs(mean - good.rhs) <= 4.0 * se;

  const auto adv = keep_only(18, {11, 13});
  const auto bad = check_bias_identity(env.mdp, env.pi_e, env.pi_b, adv, 100000, 8883,
                                       /*expect_bias=*/true);
  detail = str("exact mask |mean-truth| = %.4f (4se = %.4f); dropped-state mask bias %.3f "
               "detected and corrected: %s",
               std::abs(mean - good.rhs), 4.0 * se,
               bad.term_breakdown.at("mean_masked") - bad.rhs, bad.pass ? "yes" : "no");
  return unbiased && bad.pass;
}

bool moment_identities(std::string& detail) {
  const auto doc = two_stage_chain();
  const auto& pe = doc.policies.at("pi_e");
  const auto& pb = doc.policies.at("pi_b");
  const auto mask = keep_only(3, {1});
  const auto bias = check_bias_identity(doc.mdp, pe, pb, mask, 500000, 8884);
  const auto var = check_variance_identity(doc.mdp, pe, pb, mask, 500000, 8884);
  detail = str("bias lhs %.4f vs %.4f; variance lhs %.4f vs rhs %.4f", bias.lhs, bias.rhs,
               var.lhs, var.rhs);
  return bias.pass && var.pass;
}

bool nested_mask_monotonicity(std::string& detail) {
  const auto doc = ratio_hub_chain(6, 0.1, 0.5);
  const auto masks = nested_hub_masks(7, {1, 3, 6});
  const auto rep = check_length_propositions(doc.mdp, doc.policies.at("pi_e"),
                                             doc.policies.at("pi_b"), masks, 200000, 8886);
  detail = str("variance %.3f < %.3f < %.3f, mean log weight %.3f > %.3f > %.3f",
               rep.term_breakdown.at("var_0"), rep.term_breakdown.at("var_1"),
               rep.term_breakdown.at("var_2"), rep.term_breakdown.at("logmean_0"),
               rep.term_breakdown.at("logmean_1"), rep.term_breakdown.at("logmean_2"));
  return rep.pass;
}

bool statistical_tests(std::string& detail) {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {2, 3, 4, 5, 6};
  const auto welch = welch_t_test(a, b, 0.05);
  const bool welch_ok = std::abs(welch.statistic - (-1.0)) <= 1e-3 &&
                        std::abs(welch.df - 8.0) <= 1e-3 &&
                        std::abs(welch.p_value - 0.3466) <= 1e-3;

  const std::vector<double> lo = {0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> hi = {1.1, 1.2, 1.3, 1.4, 1.5};
  const auto ks = smirnov_test(lo, hi, 0.2);
  const bool ks_ok = ks.statistic == 1.0 && ks.reject;

  const auto doc = ratio_only_chain();
  const auto& pe = doc.policies.at("pi_e");
  const auto& pb = doc.policies.at("pi_b");
  RelevanceConfig cfg;
  int rejections = 0;
  for (int tr = 0; tr < 1000; ++tr) {
    const auto batch = sample_batch(doc.mdp, pb, 25, derive_stream(11, static_cast<std::uint64_t>(tr)));
    rejections += estimate_relevance(batch, pe, pb, doc.mdp.gamma, 0, cfg).theta;
  }
  const double rate = rejections / 1000.0;
  detail = str("welch t=%.4f df=%.2f p=%.4f; disjoint D=%.0f reject=%d; "
               "false-keep rate %.3f (budget 0.08)",
               welch.statistic, welch.df, welch.p_value, ks.statistic, ks.reject ? 1 : 0, rate);
  return welch_ok && ks_ok && rate <= 0.08;
}

bool benchmark_orderings(std::string& detail) {
  auto cfg = default_config("bench");
  cfg.trials = 200;
  cfg.batch_size = 25;
  cfg.alpha = 0.05;

  const auto dd = run_benchmark(resolve_environment("dilly_dallying"), cfg);
  cfg.env = "express";
  const auto xp = run_benchmark(resolve_environment("express"), cfg);

  const bool truth_ok = dd.dp_truth_eval >= 4.0 && dd.dp_truth_eval <= 4.6;
  const auto& dd_is = summary_row(dd, 25, 0.05, "is");
  const auto& dd_os = summary_row(dd, 25, 0.05, "osiris");
  const auto& dd_wis = summary_row(dd, 25, 0.05, "wis");
  const auto& dd_ow = summary_row(dd, 25, 0.05, "osirwis");
  const auto& xp_is = summary_row(xp, 25, 0.05, "is");
  const auto& xp_os = summary_row(xp, 25, 0.05, "osiris");
  const double gap_dd = dd_is.rmse - dd_os.rmse;
  const double gap_xp = xp_is.rmse - xp_os.rmse;
  detail = str("dd rmse is/osiris %.2f/%.2f wis/osirwis %.2f/%.2f std is/osiris %.2f/%.2f; "
               "gap dd %.2f vs express %.2f",
               dd_is.rmse, dd_os.rmse, dd_wis.rmse, dd_ow.rmse, dd_is.stddev, dd_os.stddev,
               gap_dd, gap_xp);
  return truth_ok && dd_os.rmse < dd_is.rmse && dd_ow.rmse < dd_wis.rmse &&
         dd_os.stddev < dd_is.stddev && gap_xp < gap_dd;
}

bool consistency_trend(std::string& detail) {
  auto cfg = default_config("consistency");
  cfg.trials = 200;
  cfg.batch_sizes = {10, 100};
  cfg.alphas = {0.05, 1.0};
  const auto res = run_consistency(resolve_environment("dilly_dallying"), cfg);

  const double bias_small = summary_row(res, 10, 0.05, "osirwis").abs_bias;
  const double bias_large = summary_row(res, 100, 0.05, "osirwis").abs_bias;

  double worst = 0.0;
  for (const auto& row : res.trials) {
    if (row.alpha != 1.0) continue;
    if (row.estimator != "osiris" && row.estimator != "osirwis") continue;
    const std::string base = row.estimator == "osiris" ? "is" : "wis";
    for (const auto& other : res.trials) {
      if (other.trial == row.trial && other.batch_size == row.batch_size &&
          other.alpha == 1.0 && other.estimator == base) {
        worst = std::max(worst, std::abs(row.estimate - other.estimate));
      }
    }
  }
  detail = str("osirwis |bias| %.3f at batch 10 -> %.3f at batch 100; "
               "alpha-1 max |masked - unmasked| = %.3g",
               bias_small, bias_large, worst);
  return bias_large < bias_small && worst <= 1e-12;
}

bool relevance_map_separation(std::string& detail) {
  auto cfg = default_config("relevance-map");
  cfg.trials = 200;
  cfg.batch_size = 25;
  cfg.alpha = 0.05;
  const auto res = run_relevance_map(resolve_environment("dilly_dallying"), cfg);
  double branch_sum = 0.0;
  int branch_n = 0;
  double corridor_max = 0.0;
  for (const auto& row : res.rows) {
    if (row.kind == "branch") {
      branch_sum += row.theta_freq;
      ++branch_n;
    } else if (row.kind == "corridor") {
      corridor_max = std::max(corridor_max, row.theta_freq);
    }
  }
  const double branch_mean = branch_sum / branch_n;
  detail = str("branch mean keep rate %.3f vs highest corridor rate %.3f (need gap >= 0.2)",
               branch_mean, corridor_max);
  return branch_mean >= corridor_max + 0.2;
}

bool weight_length_trend(std::string& detail) {
  const auto env = resolve_environment("dilly_dallying");
  RelevanceConfig cfg;
  const auto rep = weight_length_analysis(env.mdp, env.pi_e, env.pi_b, {0.05, 1.0}, 200, 25,
                                          cfg, 1717);
  const double v_small = rep.weight_variance_by_alpha.at(0.05);
  const double v_full = rep.weight_variance_by_alpha.at(1.0);
  detail = str("pearson(log weight, length) = %.3f (need <= -0.3); weight variance %.2f at "
               "alpha 0.05 vs %.2f at alpha 1",
               rep.pearson_log_weight_length, v_small, v_full);
  return !rep.degenerate && rep.pearson_log_weight_length <= -0.3 && v_small < v_full;
}

bool determinism(std::string& detail) {
  auto cfg = default_config("bench");
  cfg.trials = 8;
  cfg.batch_size = 10;
  const auto env = resolve_environment("dilly_dallying");

  const fs::path base = "acceptance_determinism_tmp";
  fs::remove_all(base);
  const auto run_to = [&](const char* workers, const fs::path& dir) {
    setenv("OSIRIS_WORKERS", workers, 1);
    write_benchmark_files(run_benchmark(env, cfg), dir.string());
  };
  run_to("1", base / "w1");
  run_to("8", base / "w8");
  run_to("8", base / "w8_again");
  unsetenv("OSIRIS_WORKERS");

  bool same = true;
  for (const char* name : {"bench_summary.csv", "bench_trials.csv", "bench.json"}) {
    const std::string first = slurp(base / "w1" / name);
    same = same && !first.empty() && first == slurp(base / "w8" / name) &&
           first == slurp(base / "w8_again" / name);
  }
  fs::remove_all(base);
  detail = str("1-worker, 8-worker, and repeated runs produced %s files",
               same ? "byte-identical" : "DIFFERING");
  return same;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*fn)(std::string&);
  };
  const Criterion criteria[] = {
      {"estimator_reductions", estimator_reductions},
      {"composite_policy_value", composite_policy_value},
      {"omitted_factor_mean", omitted_factor_mean},
      {"exact_mask_unbiasedness", exact_mask_unbiasedness},
      {"moment_identities", moment_identities},
      {"nested_mask_monotonicity", nested_mask_monotonicity},
      {"statistical_tests", statistical_tests},
      {"benchmark_orderings", benchmark_orderings},
      {"consistency_trend", consistency_trend},
      {"relevance_map_separation", relevance_map_separation},
      {"weight_length_trend", weight_length_trend},
      {"determinism", determinism},
  };

  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = str("exception: %s", e.what());
    }
    if (!ok) ++failures;
    std::printf("%s %2d %-26s %s\n", ok ? "PASS" : "FAIL", index, c.name, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures;
}
