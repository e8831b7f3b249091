#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osiris/diagnostics.hpp"
#include "osiris/gridworld.hpp"
#include "osiris/mdp.hpp"
#include "osiris/relevance.hpp"

namespace osiris {

// Settings shared by the experiment commands. Every command only reads the
// fields it documents; seeds have per-command defaults that apply when the
// user sets none.
struct ExperimentConfig {
  std::string env = "dilly_dallying";  // dilly_dallying | express | file:<path>
  std::optional<std::uint64_t> seed;
  int trials = 200;
  int batch_size = 25;
  double alpha = 0.05;                       // relevance level for bench / relevance-map
  std::vector<double> alphas = {0.05, 1.0};  // consistency grid
  std::vector<int> batch_sizes = {10, 25, 100};
  RelevanceConfig relevance;  // test kind / partition / min samples; alpha is taken from above
  long long diag_draws = 200000;
  long long chain_draws = 500000;
  int wl_trials = 200;
  std::string out_dir;  // empty: write no files
};

// Defaults for one command, including its master seed:
// bench 777, consistency 555, relevance-map 991, diagnostics 31337.
ExperimentConfig default_config(const std::string& command);

// Overrides cfg from a strict JSON object; unknown fields are errors named
// by their JSON path. A rejected document leaves cfg unchanged.
void apply_config_json(ExperimentConfig& cfg, const std::string& json_text);

std::uint64_t effective_seed(const ExperimentConfig& cfg, const std::string& command);

// A ready-to-run environment. layout is set for the built-in gridworlds and
// enriches CSV output with cell coordinates.
struct Environment {
  std::string name;
  MdpSpec mdp;
  PolicySpec pi_e;
  PolicySpec pi_b;
  std::optional<GridworldModel> layout;
};

// "dilly_dallying", "express", or "file:<path>" (a saved MDP document with
// policies named pi_e and pi_b).
Environment resolve_environment(const std::string& env_spec);

struct TrialEstimate {
  int trial = 0;
  int batch_size = 0;
  double alpha = 0.0;
  std::string estimator;
  double estimate = 0.0;
  double mean_effective_length = 0.0;
  int kept_states = 0;
};

struct SummaryRow {
  int batch_size = 0;
  double alpha = 0.0;
  std::string estimator;
  int n_trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation across trials
  double rmse = 0.0;    // against the exact value of pi_e
  double abs_bias = 0.0;
};

struct BenchResult {
  std::string command;
  std::string env_name;
  std::uint64_t seed = 0;
  double dp_truth_eval = 0.0;
  double dp_truth_behavior = 0.0;
  std::vector<TrialEstimate> trials;
  std::vector<SummaryRow> summary;
  double wall_ms = 0.0;  // measured, never written to files
};

struct RelevanceMapRow {
  int state = 0;
  int row = -1;  // cell coordinates when the environment has a layout
  int col = -1;
  std::string kind;  // corridor | branch | terminal (gridworlds), state otherwise
  double theta_freq = 0.0;
  double mean_visits = 0.0;
  int true_relevant = 0;
};

struct RelevanceMapResult {
  std::string env_name;
  std::uint64_t seed = 0;
  int n_trials = 0;
  int batch_size = 0;
  double alpha = 0.0;
  std::vector<RelevanceMapRow> rows;
  double wall_ms = 0.0;
};

struct DiagnosticsResult {
  std::string env_name;
  std::uint64_t seed = 0;
  std::vector<IdentityCheckReport> checks;
  CorrelationReport weight_length;
  bool all_pass = false;
  double wall_ms = 0.0;
};

// Per trial: batch of batch_size trajectories from pi_b, mask re-estimated
// at cfg.alpha, then every estimator evaluated on the same batch (mc uses a
// matching on-policy batch). Trials run in parallel; outputs are identical
// for any worker count.
BenchResult run_benchmark(const Environment& env, const ExperimentConfig& cfg);

// The same protocol over the batch_sizes x alphas grid, without mc.
BenchResult run_consistency(const Environment& env, const ExperimentConfig& cfg);

// Per-state keep frequency across trials, next to the exact relevance.
RelevanceMapResult run_relevance_map(const Environment& env, const ExperimentConfig& cfg);

// Identity checks on the environment, moment identities on the built-in
// reference chain, weight-length propositions on the built-in hub chain,
// and the pooled weight-length analysis on the environment.
DiagnosticsResult run_diagnostics(const Environment& env, const ExperimentConfig& cfg);

// Writers. CSV files start with "# key: value" metadata lines (tool version,
// command, env, seed, sizes, exact values) followed by a single header row;
// doubles carry 17 significant digits. The JSON files hold the same data
// plus the full term breakdowns. Wall-clock times are excluded everywhere.
void write_benchmark_files(const BenchResult& res, const std::string& out_dir);
void write_relevance_map_files(const RelevanceMapResult& res, const std::string& out_dir);
void write_diagnostics_files(const DiagnosticsResult& res, const std::string& out_dir);

// Human-readable summaries for the terminal.
std::string format_benchmark_table(const BenchResult& res);
std::string format_relevance_map_table(const RelevanceMapResult& res);
std::string format_diagnostics_table(const DiagnosticsResult& res);

}  // namespace osiris
