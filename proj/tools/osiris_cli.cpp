// Command line front end: bench, consistency, relevance-map, diagnostics.
// Exit codes: 0 success, 1 failed diagnostics checks, 2 usage or config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "osiris/experiments.hpp"
#include "osiris/version.hpp"

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliValues {
  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  int batch_size = 0;
  double alpha = 0.0;
  std::string env;
  std::string out_dir;
};

void add_common_options(CLI::App* sub, CliValues& v) {
  sub->add_option("--config", v.config_path, "JSON config file applied before other flags");
  sub->add_option("--seed", v.seed, "master seed (defaults depend on the command)");
  sub->add_option("--trials", v.trials, "number of independent trials");
  sub->add_option("--batch-size", v.batch_size, "trajectories per behavior batch");
  sub->add_option("--alpha", v.alpha, "significance level for the relevance tests");
  sub->add_option("--env", v.env, "dilly_dallying | express | file:<path>");
  sub->add_option("--out", v.out_dir, "directory for CSV/JSON outputs (none written otherwise)");
}

int run_command(const std::string& command, const CLI::App* sub, const CliValues& v) {
  osiris::ExperimentConfig cfg = osiris::default_config(command);
  if (sub->count("--config") > 0) {
    osiris::apply_config_json(cfg, read_text_file(v.config_path));
  }
  if (sub->count("--seed") > 0) cfg.seed = v.seed;
  if (sub->count("--trials") > 0) cfg.trials = v.trials;
  if (sub->count("--batch-size") > 0) cfg.batch_size = v.batch_size;
  if (sub->count("--alpha") > 0) cfg.alpha = v.alpha;
  if (sub->count("--env") > 0) cfg.env = v.env;
  if (sub->count("--out") > 0) cfg.out_dir = v.out_dir;
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");

  const osiris::Environment env = osiris::resolve_environment(cfg.env);
  int rc = 0;
  double wall_ms = 0.0;
  if (command == "bench" || command == "consistency") {
    const osiris::BenchResult res = command == "bench" ? osiris::run_benchmark(env, cfg)
                                                       : osiris::run_consistency(env, cfg);
    std::cout << osiris::format_benchmark_table(res);
    if (!cfg.out_dir.empty()) osiris::write_benchmark_files(res, cfg.out_dir);
    wall_ms = res.wall_ms;
  } else if (command == "relevance-map") {
    const osiris::RelevanceMapResult res = osiris::run_relevance_map(env, cfg);
    std::cout << osiris::format_relevance_map_table(res);
    if (!cfg.out_dir.empty()) osiris::write_relevance_map_files(res, cfg.out_dir);
    wall_ms = res.wall_ms;
  } else {
    const osiris::DiagnosticsResult res = osiris::run_diagnostics(env, cfg);
    std::cout << osiris::format_diagnostics_table(res);
    if (!cfg.out_dir.empty()) osiris::write_diagnostics_files(res, cfg.out_dir);
    wall_ms = res.wall_ms;
    rc = res.all_pass ? 0 : 1;
  }
  if (!cfg.out_dir.empty()) std::cout << "wrote files to " << cfg.out_dir << "\n";
  std::cout << "wall time: " << wall_ms << " ms\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular off-policy evaluation with state-relevance masked importance sampling"};
  app.set_version_flag("--version", std::string("osiris ") + osiris::kVersion);
  app.require_subcommand(1);

  CliValues v;
  CLI::App* bench = app.add_subcommand(
      "bench", "estimator accuracy across repeated behavior batches");
  CLI::App* consistency = app.add_subcommand(
      "consistency", "estimator behavior over a batch-size x alpha grid");
  CLI::App* relevance_map = app.add_subcommand(
      "relevance-map", "per-state keep frequency of the relevance test");
  CLI::App* diagnostics = app.add_subcommand(
      "diagnostics", "importance weighting identity and proposition checks");
  for (CLI::App* sub : {bench, consistency, relevance_map, diagnostics}) {
    add_common_options(sub, v);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  try {
    return run_command(sub->get_name(), sub, v);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
