// dicode: construct, simulate, and verify deterministic identification codes
// for the molecule-counting Binomial channel.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dicode/experiment.hpp"

namespace {

struct CliState {
  std::optional<std::string> config_path;
  dicode::CliOverrides overrides;
};

void add_common_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--seed", st.overrides.seed, "root seed for all substreams");
  cmd->add_option("--out", st.overrides.out_dir, "output directory");
  cmd->add_option("--trials", st.overrides.trials, "Monte Carlo trials per estimate");
  cmd->add_option("--n", st.overrides.n, "blocklength (also collapses the bounds grid)");
  cmd->add_option("--b", st.overrides.b, "exponent constant in (0,1)");
  cmd->add_option("--threads", st.overrides.threads, "worker threads (results do not depend on this)");
  cmd->add_option("--codebook", st.overrides.codebook, "codebook file for simulate/verify");
}

dicode::ExperimentConfig make_config(const CliState& st) {
  dicode::ExperimentConfig cfg;
  if (st.config_path) cfg = dicode::ExperimentConfig::load(*st.config_path);
  dicode::apply_overrides(cfg, st.overrides);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic identification codes for the Binomial channel"};
  app.require_subcommand(1);

  CliState st;
  CLI::App* construct = app.add_subcommand("construct", "build and certify a codebook");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo type I/II error estimates");
  CLI::App* bounds = app.add_subcommand("bounds", "finite-n achievable-rate table");
  CLI::App* verify = app.add_subcommand("verify", "property suites; exit 2 on failure");
  for (CLI::App* cmd : {construct, simulate, bounds, verify}) add_common_flags(cmd, st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dicode::kExitUsage;
  }

  try {
    const dicode::ExperimentConfig cfg = make_config(st);
    if (construct->parsed()) return dicode::run_construct(cfg);
    if (simulate->parsed()) return dicode::run_simulate(cfg);
    if (bounds->parsed()) return dicode::run_bounds(cfg);
    if (verify->parsed()) return dicode::run_verify(cfg);
    std::cerr << "error: no subcommand\n";
    return dicode::kExitUsage;
  } catch (const dicode::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dicode::kExitUsage;
  } catch (const dicode::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dicode::kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dicode::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dicode::kExitIo;
  }
}
