#include "osiris/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"
#include "osiris/dp.hpp"
#include "osiris/estimators.hpp"
#include "osiris/mdp_json.hpp"
#include "osiris/parallel.hpp"
#include "osiris/rng.hpp"
#include "osiris/stats.hpp"
#include "osiris/synthetic.hpp"
#include "osiris/version.hpp"

namespace osiris {

namespace {

using detail::json;

// 17 significant digits: enough for an exact double round trip, stable
// across platforms with a C locale.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::uint64_t default_seed_for(const std::string& command) {
  if (command == "bench") return 777;
  if (command == "consistency") return 555;
  if (command == "relevance-map") return 991;
  if (command == "diagnostics") return 31337;
  throw std::invalid_argument("unknown command: " + command);
}

TestKind parse_test_kind(const std::string& s, const std::string& path) {
  if (s == "welch") return TestKind::welch;
  if (s == "smirnov") return TestKind::smirnov;
  detail::fail_at(path, "expected \"welch\" or \"smirnov\"");
}

PartitionKind parse_partition_kind(const std::string& s, const std::string& path) {
  if (s == "ratio_binary") return PartitionKind::ratio_binary;
  if (s == "return_binary") return PartitionKind::return_binary;
  detail::fail_at(path, "expected \"ratio_binary\" or \"return_binary\"");
}

void open_out(std::ofstream& out, const std::string& dir, const std::string& name) {
  const auto path = std::filesystem::path(dir) / name;
  out.open(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
}

void write_meta(std::ofstream& out, const std::string& command, const std::string& env,
                std::uint64_t seed) {
  out << "# tool: osiris " << kVersion << "\n";
  out << "# command: " << command << "\n";
  out << "# env: " << env << "\n";
  out << "# seed: " << seed << "\n";
}

}  // namespace

ExperimentConfig default_config(const std::string& command) {
  ExperimentConfig cfg;
  (void)default_seed_for(command);  // validates the name
  return cfg;
}

std::uint64_t effective_seed(const ExperimentConfig& cfg, const std::string& command) {
  return cfg.seed.has_value() ? *cfg.seed : default_seed_for(command);
}

void apply_config_json(ExperimentConfig& out, const std::string& json_text) {
  // Work on a copy so a rejected document leaves the caller's config intact.
  ExperimentConfig cfg = out;
  const json doc = detail::parse_document(json_text, "config");
  const std::string root = "config";
  detail::check_allowed_keys(doc, root,
                             {"env", "seed", "trials", "batch_size", "alpha", "alphas",
                              "batch_sizes", "relevance", "diag_draws", "chain_draws",
                              "wl_trials", "out_dir"});
  if (doc.contains("env")) cfg.env = detail::as_string(doc["env"], root + ".env");
  if (doc.contains("seed")) {
    const auto& j = doc["seed"];
    if (!j.is_number_unsigned() && !j.is_number_integer()) {
      detail::fail_at(root + ".seed", "expected a non-negative integer");
    }
    const auto v = j.get<long long>();
    if (v < 0) detail::fail_at(root + ".seed", "expected a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  if (doc.contains("trials")) cfg.trials = detail::as_int(doc["trials"], root + ".trials");
  if (doc.contains("batch_size")) {
    cfg.batch_size = detail::as_int(doc["batch_size"], root + ".batch_size");
  }
  if (doc.contains("alpha")) cfg.alpha = detail::as_number(doc["alpha"], root + ".alpha");
  if (doc.contains("alphas")) {
    const auto& arr = detail::as_array(doc["alphas"], root + ".alphas");
    cfg.alphas.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      cfg.alphas.push_back(detail::as_number(arr[i], root + ".alphas[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("batch_sizes")) {
    const auto& arr = detail::as_array(doc["batch_sizes"], root + ".batch_sizes");
    cfg.batch_sizes.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      cfg.batch_sizes.push_back(
          detail::as_int(arr[i], root + ".batch_sizes[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("relevance")) {
    const auto& rel = doc["relevance"];
    const std::string rpath = root + ".relevance";
    detail::check_allowed_keys(rel, rpath, {"test", "partition", "min_samples_per_side"});
    if (rel.contains("test")) {
      cfg.relevance.test = parse_test_kind(detail::as_string(rel["test"], rpath + ".test"),
                                           rpath + ".test");
    }
    if (rel.contains("partition")) {
      cfg.relevance.partition = parse_partition_kind(
          detail::as_string(rel["partition"], rpath + ".partition"), rpath + ".partition");
    }
    if (rel.contains("min_samples_per_side")) {
      cfg.relevance.min_samples_per_side =
          detail::as_int(rel["min_samples_per_side"], rpath + ".min_samples_per_side");
    }
  }
  if (doc.contains("diag_draws")) {
    cfg.diag_draws = detail::as_int(doc["diag_draws"], root + ".diag_draws");
  }
  if (doc.contains("chain_draws")) {
    cfg.chain_draws = detail::as_int(doc["chain_draws"], root + ".chain_draws");
  }
  if (doc.contains("wl_trials")) cfg.wl_trials = detail::as_int(doc["wl_trials"], root + ".wl_trials");
  if (doc.contains("out_dir")) cfg.out_dir = detail::as_string(doc["out_dir"], root + ".out_dir");
  if (cfg.trials < 1) detail::fail_at(root + ".trials", "must be positive");
  if (cfg.batch_size < 1) detail::fail_at(root + ".batch_size", "must be positive");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) detail::fail_at(root + ".alpha", "must lie in [0, 1]");
  for (double a : cfg.alphas) {
    if (a < 0.0 || a > 1.0) detail::fail_at(root + ".alphas", "entries must lie in [0, 1]");
  }
  for (int b : cfg.batch_sizes) {
    if (b < 1) detail::fail_at(root + ".batch_sizes", "entries must be positive");
  }
  out = std::move(cfg);
}

Environment resolve_environment(const std::string& env_spec) {
  Environment env;
  if (env_spec == "dilly_dallying" || env_spec == "express") {
    GridworldModel model =
        env_spec == "express" ? canonical_express() : canonical_dilly_dallying();
    env.name = env_spec;
    env.mdp = model.mdp;
    env.pi_e = model.pi_e;
    env.pi_b = model.pi_b;
    env.layout = std::move(model);
    return env;
  }
  if (env_spec.rfind("file:", 0) == 0) {
    const std::string path = env_spec.substr(5);
    MdpDocument doc = load_mdp_file(path);
    if (!doc.policies.count("pi_e") || !doc.policies.count("pi_b")) {
      throw std::invalid_argument("environment file must define policies pi_e and pi_b: " + path);
    }
    env.name = env_spec;
    env.mdp = std::move(doc.mdp);
    env.pi_e = doc.policies.at("pi_e");
    env.pi_b = doc.policies.at("pi_b");
    return env;
  }
  throw std::invalid_argument("unknown environment \"" + env_spec +
                              "\" (expected dilly_dallying, express, or file:<path>)");
}

namespace {

BenchResult run_grid(const Environment& env, const ExperimentConfig& cfg,
                     const std::string& command, const std::vector<int>& batch_sizes,
                     const std::vector<double>& alphas, bool include_mc) {
  if (cfg.trials < 1) throw std::invalid_argument(command + ": trials must be positive");
  for (int b : batch_sizes) {
    if (b < 1) throw std::invalid_argument(command + ": batch sizes must be positive");
  }
  const double t0 = now_ms();
  BenchResult res;
  res.command = command;
  res.env_name = env.name;
  res.seed = effective_seed(cfg, command);
  res.dp_truth_eval = exact_policy_value(env.mdp, env.pi_e).value;
  res.dp_truth_behavior = exact_policy_value(env.mdp, env.pi_b).value;

  std::vector<std::vector<TrialEstimate>> per_trial(static_cast<std::size_t>(cfg.trials));
  parallel_for_index(cfg.trials, [&](long long tr) {
    std::vector<TrialEstimate> rows;
    const std::uint64_t bseed = derive_stream(res.seed, static_cast<std::uint64_t>(tr));
    for (int bs : batch_sizes) {
      const auto batch = sample_batch(env.mdp, env.pi_b, bs, derive_stream(bseed, 1));
      TrajectoryBatch on_policy;
      if (include_mc) on_policy = sample_batch(env.mdp, env.pi_e, bs, derive_stream(bseed, 2));
      const auto rep_is = is_estimate(batch, env.pi_e, env.pi_b, env.mdp.gamma);
      const auto rep_wis = wis_estimate(batch, env.pi_e, env.pi_b, env.mdp.gamma);
      const int full_states = env.mdp.n_states;
      for (double alpha : alphas) {
        RelevanceConfig rcfg = cfg.relevance;
        rcfg.alpha = alpha;
        const auto mask = estimate_relevance_map(batch, env.pi_e, env.pi_b, env.mdp.gamma, rcfg);
        const WeightConfig wcfg{env.pi_e, env.pi_b, mask};
        const auto rep_os = osiris_estimate(batch, wcfg, env.mdp.gamma);
        const auto rep_ow = osirwis_estimate(batch, wcfg, env.mdp.gamma);
        auto mean_len = [](const EstimatorReport& r) {
          double s = 0.0;
          for (int l : r.effective_length) s += l;
          return r.effective_length.empty() ? 0.0 : s / static_cast<double>(r.effective_length.size());
        };
        auto push = [&](const EstimatorReport& r, int kept) {
          rows.push_back({static_cast<int>(tr), bs, alpha, r.estimator_id, r.estimate,
                          mean_len(r), kept});
        };
        if (include_mc) {
          const auto rep_mc = mc_estimate(on_policy, env.mdp.gamma);
          push(rep_mc, full_states);
        }
        push(rep_is, full_states);
        push(rep_wis, full_states);
        push(rep_os, mask.count_kept());
        push(rep_ow, mask.count_kept());
      }
    }
    per_trial[static_cast<std::size_t>(tr)] = std::move(rows);
  });
  for (auto& rows : per_trial) {
    res.trials.insert(res.trials.end(), rows.begin(), rows.end());
  }

  // Group by (batch_size, alpha, estimator); summary rows come out sorted by
  // that key so file output is stable.
  std::vector<std::tuple<int, double, std::string>> keys;
  std::map<std::tuple<int, double, std::string>, std::vector<double>> groups;
  for (const auto& t : res.trials) {
    const auto key = std::make_tuple(t.batch_size, t.alpha, t.estimator);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(t.estimate);
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& key : keys) {
    const auto& vals = groups.at(key);
    SummaryRow row;
    row.batch_size = std::get<0>(key);
    row.alpha = std::get<1>(key);
    row.estimator = std::get<2>(key);
    row.n_trials = static_cast<int>(vals.size());
    row.mean = mean_of(vals);
    row.stddev = std::sqrt(population_variance(vals));
    double se = 0.0;
    for (double v : vals) se += (v - res.dp_truth_eval) * (v - res.dp_truth_eval);
    row.rmse = std::sqrt(se / static_cast<double>(vals.size()));
    row.abs_bias = std::abs(row.mean - res.dp_truth_eval);
    res.summary.push_back(std::move(row));
  }
  res.wall_ms = now_ms() - t0;
  return res;
}

}  // namespace

BenchResult run_benchmark(const Environment& env, const ExperimentConfig& cfg) {
  return run_grid(env, cfg, "bench", {cfg.batch_size}, {cfg.alpha}, /*include_mc=*/true);
}

BenchResult run_consistency(const Environment& env, const ExperimentConfig& cfg) {
  return run_grid(env, cfg, "consistency", cfg.batch_sizes, cfg.alphas, /*include_mc=*/false);
}

RelevanceMapResult run_relevance_map(const Environment& env, const ExperimentConfig& cfg) {
  const double t0 = now_ms();
  RelevanceMapResult res;
  res.env_name = env.name;
  res.seed = effective_seed(cfg, "relevance-map");
  res.n_trials = cfg.trials;
  res.batch_size = cfg.batch_size;
  res.alpha = cfg.alpha;

  const int n = env.mdp.n_states;
  std::vector<std::vector<long long>> kept(static_cast<std::size_t>(cfg.trials));
  std::vector<std::vector<long long>> visits(static_cast<std::size_t>(cfg.trials));
  parallel_for_index(cfg.trials, [&](long long tr) {
    const auto batch = sample_batch(env.mdp, env.pi_b, cfg.batch_size,
                                    derive_stream(res.seed, static_cast<std::uint64_t>(tr)));
    RelevanceConfig rcfg = cfg.relevance;
    rcfg.alpha = cfg.alpha;
    std::vector<long long> k(static_cast<std::size_t>(n), 0);
    std::vector<long long> v(static_cast<std::size_t>(n), 0);
    for (int s = 0; s < n; ++s) {
      const auto dec = estimate_relevance(batch, env.pi_e, env.pi_b, env.mdp.gamma, s, rcfg);
      k[static_cast<std::size_t>(s)] = dec.theta;
      v[static_cast<std::size_t>(s)] = dec.n_visits;
    }
    kept[static_cast<std::size_t>(tr)] = std::move(k);
    visits[static_cast<std::size_t>(tr)] = std::move(v);
  });

  const auto exact = true_relevance(env.mdp, env.pi_e, env.pi_b);
  for (int s = 0; s < n; ++s) {
    RelevanceMapRow row;
    row.state = s;
    if (env.layout.has_value()) {
      row.row = env.layout->cell_of_state[static_cast<std::size_t>(s)][0];
      row.col = env.layout->cell_of_state[static_cast<std::size_t>(s)][1];
      if (env.mdp.is_terminal(s)) {
        row.kind = "terminal";
      } else if (env.layout->is_corridor[static_cast<std::size_t>(s)]) {
        row.kind = "corridor";
      } else {
        row.kind = "branch";
      }
    } else {
      row.kind = env.mdp.is_terminal(s) ? "terminal" : "state";
    }
    long long k = 0, v = 0;
    for (int tr = 0; tr < cfg.trials; ++tr) {
      k += kept[static_cast<std::size_t>(tr)][static_cast<std::size_t>(s)];
      v += visits[static_cast<std::size_t>(tr)][static_cast<std::size_t>(s)];
    }
    row.theta_freq = static_cast<double>(k) / static_cast<double>(cfg.trials);
    row.mean_visits = static_cast<double>(v) / static_cast<double>(cfg.trials);
    row.true_relevant = exact.keeps(s) ? 1 : 0;
    res.rows.push_back(std::move(row));
  }
  res.wall_ms = now_ms() - t0;
  return res;
}

DiagnosticsResult run_diagnostics(const Environment& env, const ExperimentConfig& cfg) {
  const double t0 = now_ms();
  DiagnosticsResult res;
  res.env_name = env.name;
  res.seed = effective_seed(cfg, "diagnostics");
  const std::uint64_t seed = res.seed;

  const auto mask_true = true_relevance(env.mdp, env.pi_e, env.pi_b);
  res.checks.push_back(check_omitted_mean(env.mdp, env.pi_e, env.pi_b, mask_true, cfg.diag_draws,
                                          derive_stream(seed, 1)));
  res.checks.push_back(check_bias_identity(env.mdp, env.pi_e, env.pi_b, mask_true,
                                           cfg.diag_draws, derive_stream(seed, 2)));
  // Flip off the highest kept state: omitting a genuinely relevant state
  // must bias the masked estimate while the covariance identity still holds.
  RelevanceMapping mask_adv = mask_true;
  for (int s = env.mdp.n_states - 1; s >= 0; --s) {
    if (mask_adv.keeps(s)) {
      mask_adv.keep[static_cast<std::size_t>(s)] = 0;
      break;
    }
  }
  if (mask_adv.count_kept() != mask_true.count_kept()) {
    res.checks.push_back(check_bias_identity(env.mdp, env.pi_e, env.pi_b, mask_adv,
                                             cfg.diag_draws, derive_stream(seed, 3),
                                             /*expect_bias=*/true));
  }

  // Moment identities need finite fourth moments of the full weight, so they
  // run on the bounded-weight reference chain rather than the environment.
  const auto chain = two_stage_chain();
  const auto& chain_pe = chain.policies.at("pi_e");
  const auto& chain_pb = chain.policies.at("pi_b");
  const auto chain_mask = true_relevance(chain.mdp, chain_pe, chain_pb);
  res.checks.push_back(check_variance_identity(chain.mdp, chain_pe, chain_pb, chain_mask,
                                               cfg.chain_draws, derive_stream(seed, 4)));
  RelevanceMapping chain_adv = RelevanceMapping::no_states(chain.mdp.n_states);
  chain_adv.keep[0] = 1;  // keep only the padding state, omit the one that matters
  res.checks.push_back(check_bias_identity(chain.mdp, chain_pe, chain_pb, chain_adv,
                                           cfg.chain_draws, derive_stream(seed, 5),
                                           /*expect_bias=*/true));

  const auto hub = ratio_hub_chain(6, 0.1, 0.5);
  const auto masks = nested_hub_masks(hub.mdp.n_states, {1, 3, 6});
  res.checks.push_back(check_length_propositions(hub.mdp, hub.policies.at("pi_e"),
                                                 hub.policies.at("pi_b"), masks, cfg.diag_draws,
                                                 derive_stream(seed, 6)));

  res.weight_length = weight_length_analysis(env.mdp, env.pi_e, env.pi_b, cfg.alphas,
                                             cfg.wl_trials, cfg.batch_size, cfg.relevance,
                                             derive_stream(seed, 7));
  res.all_pass = true;
  for (const auto& c : res.checks) res.all_pass = res.all_pass && c.pass;
  res.wall_ms = now_ms() - t0;
  return res;
}

void write_benchmark_files(const BenchResult& res, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream sum;
  open_out(sum, out_dir, res.command + "_summary.csv");
  write_meta(sum, res.command, res.env_name, res.seed);
  sum << "# dp_truth_eval: " << fmt(res.dp_truth_eval) << "\n";
  sum << "# dp_truth_behavior: " << fmt(res.dp_truth_behavior) << "\n";
  sum << "batch_size,alpha,estimator,n_trials,mean,stddev,rmse,abs_bias\n";
  for (const auto& r : res.summary) {
    sum << r.batch_size << ',' << fmt(r.alpha) << ',' << r.estimator << ',' << r.n_trials << ','
        << fmt(r.mean) << ',' << fmt(r.stddev) << ',' << fmt(r.rmse) << ',' << fmt(r.abs_bias)
        << "\n";
  }

  std::ofstream tri;
  open_out(tri, out_dir, res.command + "_trials.csv");
  write_meta(tri, res.command, res.env_name, res.seed);
  tri << "# dp_truth_eval: " << fmt(res.dp_truth_eval) << "\n";
  tri << "trial,batch_size,alpha,estimator,estimate,mean_effective_length,kept_states\n";
  for (const auto& t : res.trials) {
    tri << t.trial << ',' << t.batch_size << ',' << fmt(t.alpha) << ',' << t.estimator << ','
        << fmt(t.estimate) << ',' << fmt(t.mean_effective_length) << ',' << t.kept_states
        << "\n";
  }

  json doc;
  doc["meta"] = {{"tool", "osiris"},
                 {"version", kVersion},
                 {"command", res.command},
                 {"env", res.env_name},
                 {"seed", res.seed},
                 {"dp_truth_eval", res.dp_truth_eval},
                 {"dp_truth_behavior", res.dp_truth_behavior}};
  doc["summary"] = json::array();
  for (const auto& r : res.summary) {
    doc["summary"].push_back({{"batch_size", r.batch_size},
                              {"alpha", r.alpha},
                              {"estimator", r.estimator},
                              {"n_trials", r.n_trials},
                              {"mean", r.mean},
                              {"stddev", r.stddev},
                              {"rmse", r.rmse},
                              {"abs_bias", r.abs_bias}});
  }
  doc["trials"] = json::array();
  for (const auto& t : res.trials) {
    doc["trials"].push_back({{"trial", t.trial},
                             {"batch_size", t.batch_size},
                             {"alpha", t.alpha},
                             {"estimator", t.estimator},
                             {"estimate", t.estimate},
                             {"mean_effective_length", t.mean_effective_length},
                             {"kept_states", t.kept_states}});
  }
  std::ofstream js;
  open_out(js, out_dir, res.command + ".json");
  js << doc.dump(2) << "\n";
}

void write_relevance_map_files(const RelevanceMapResult& res, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv;
  open_out(csv, out_dir, "relevance_map.csv");
  write_meta(csv, "relevance-map", res.env_name, res.seed);
  csv << "# trials: " << res.n_trials << "\n";
  csv << "# batch_size: " << res.batch_size << "\n";
  csv << "# alpha: " << fmt(res.alpha) << "\n";
  csv << "state,row,col,kind,theta_freq,mean_visits,true_relevant\n";
  for (const auto& r : res.rows) {
    csv << r.state << ',' << r.row << ',' << r.col << ',' << r.kind << ',' << fmt(r.theta_freq)
        << ',' << fmt(r.mean_visits) << ',' << r.true_relevant << "\n";
  }

  json doc;
  doc["meta"] = {{"tool", "osiris"},      {"version", kVersion},
                 {"command", "relevance-map"}, {"env", res.env_name},
                 {"seed", res.seed},      {"trials", res.n_trials},
                 {"batch_size", res.batch_size}, {"alpha", res.alpha}};
  doc["states"] = json::array();
  for (const auto& r : res.rows) {
    doc["states"].push_back({{"state", r.state},
                             {"row", r.row},
                             {"col", r.col},
                             {"kind", r.kind},
                             {"theta_freq", r.theta_freq},
                             {"mean_visits", r.mean_visits},
                             {"true_relevant", r.true_relevant != 0}});
  }
  std::ofstream js;
  open_out(js, out_dir, "relevance_map.json");
  js << doc.dump(2) << "\n";
}

void write_diagnostics_files(const DiagnosticsResult& res, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv;
  open_out(csv, out_dir, "diagnostics_checks.csv");
  write_meta(csv, "diagnostics", res.env_name, res.seed);
  csv << "check_id,lhs,rhs,lhs_se,rhs_se,n_draws,seed,expect_bias,pass\n";
  for (const auto& c : res.checks) {
    csv << c.check_id << ',' << fmt(c.lhs) << ',' << fmt(c.rhs) << ',' << fmt(c.lhs_se) << ','
        << fmt(c.rhs_se) << ',' << c.n_draws << ',' << c.seed << ',' << (c.expect_bias ? 1 : 0)
        << ',' << (c.pass ? 1 : 0) << "\n";
  }

  json doc;
  doc["meta"] = {{"tool", "osiris"},
                 {"version", kVersion},
                 {"command", "diagnostics"},
                 {"env", res.env_name},
                 {"seed", res.seed},
                 {"all_pass", res.all_pass}};
  doc["checks"] = json::array();
  for (const auto& c : res.checks) {
    json jc = {{"check_id", c.check_id}, {"lhs", c.lhs},
               {"rhs", c.rhs},           {"lhs_se", c.lhs_se},
               {"rhs_se", c.rhs_se},     {"n_draws", c.n_draws},
               {"seed", c.seed},         {"expect_bias", c.expect_bias},
               {"pass", c.pass}};
    jc["terms"] = json::object();
    for (const auto& [k, v] : c.term_breakdown) jc["terms"][k] = v;
    doc["checks"].push_back(std::move(jc));
  }
  const auto& wl = res.weight_length;
  json jwl = {{"n_points", wl.n_points},
              {"n_zero_weight_excluded", wl.n_zero_weight_excluded},
              {"pearson_log_weight_length", wl.pearson_log_weight_length},
              {"degenerate", wl.degenerate},
              {"n_trials", wl.n_trials},
              {"batch_size", wl.batch_size},
              {"seed", wl.seed}};
  jwl["weights_by_alpha"] = json::array();
  for (const auto& [alpha, var] : wl.weight_variance_by_alpha) {
    jwl["weights_by_alpha"].push_back(
        {{"alpha", alpha}, {"variance", var}, {"mean", wl.weight_mean_by_alpha.at(alpha)}});
  }
  doc["weight_length"] = std::move(jwl);
  std::ofstream js;
  open_out(js, out_dir, "diagnostics.json");
  js << doc.dump(2) << "\n";
}

std::string format_benchmark_table(const BenchResult& res) {
  std::ostringstream out;
  char line[256];
  out << res.command << " on " << res.env_name << " (seed " << res.seed << ")\n";
  out << "exact V(pi_e) = " << fmt(res.dp_truth_eval)
      << ", exact V(pi_b) = " << fmt(res.dp_truth_behavior) << "\n";
  std::snprintf(line, sizeof(line), "%10s %8s %10s %8s %10s %10s %10s\n", "batch", "alpha",
                "estimator", "trials", "mean", "stddev", "rmse");
  out << line;
  for (const auto& r : res.summary) {
    std::snprintf(line, sizeof(line), "%10d %8.3f %10s %8d %10.4f %10.4f %10.4f\n", r.batch_size,
                  r.alpha, r.estimator.c_str(), r.n_trials, r.mean, r.stddev, r.rmse);
    out << line;
  }
  return out.str();
}

std::string format_relevance_map_table(const RelevanceMapResult& res) {
  std::ostringstream out;
  char line[256];
  out << "relevance-map on " << res.env_name << " (seed " << res.seed << ", alpha "
      << fmt(res.alpha) << ", " << res.n_trials << " trials of " << res.batch_size << ")\n";
  std::snprintf(line, sizeof(line), "%6s %4s %4s %10s %11s %12s %14s\n", "state", "row", "col",
                "kind", "theta_freq", "mean_visits", "true_relevant");
  out << line;
  for (const auto& r : res.rows) {
    std::snprintf(line, sizeof(line), "%6d %4d %4d %10s %11.3f %12.2f %14d\n", r.state, r.row,
                  r.col, r.kind.c_str(), r.theta_freq, r.mean_visits, r.true_relevant);
    out << line;
  }
  return out.str();
}

std::string format_diagnostics_table(const DiagnosticsResult& res) {
  std::ostringstream out;
  char line[256];
  out << "diagnostics on " << res.env_name << " (seed " << res.seed << ")\n";
  std::snprintf(line, sizeof(line), "%-34s %12s %12s %10s %10s %6s\n", "check", "lhs", "rhs",
                "lhs_se", "rhs_se", "pass");
  out << line;
  for (const auto& c : res.checks) {
    std::snprintf(line, sizeof(line), "%-34s %12.5f %12.5f %10.5f %10.5f %6s\n",
                  c.check_id.c_str(), c.lhs, c.rhs, c.lhs_se, c.rhs_se, c.pass ? "ok" : "FAIL");
    out << line;
  }
  const auto& wl = res.weight_length;
  out << "weight/length correlation r = " << fmt(wl.pearson_log_weight_length) << " over "
      << wl.n_points << " trajectories (" << wl.n_zero_weight_excluded << " zero weights excluded)\n";
  for (const auto& [alpha, var] : wl.weight_variance_by_alpha) {
    out << "  pooled weight variance at alpha " << fmt(alpha) << ": " << fmt(var) << "\n";
  }
  out << (res.all_pass ? "all checks passed\n" : "CHECK FAILURES PRESENT\n");
  return out.str();
}

}  // namespace osiris
