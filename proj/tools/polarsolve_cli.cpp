// polarsolve: command-line front end for the experiment runner.
//
//   polarsolve <subcommand> --config FILE [--out DIR] [--override key=value]...
//
// Exit codes: 0 ok, 1 I/O failure, 2 invalid config, 3 solver did not
// converge or oracle mismatch.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "polarsolve/experiment.hpp"

namespace {

int run(const std::string& subcommand, const std::string& config_path, const std::string& out,
        const std::vector<std::string>& overrides) {
  using namespace polarsolve;
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (subcommand != "run") {
      const auto requested = parse_experiment(subcommand);
      if (cfg.sources.count("experiment") && cfg.experiment != *requested) {
        std::cerr << "error: " << cfg.sources["experiment"] << ": field 'experiment': config says '"
                  << experiment_name(cfg.experiment) << "' but subcommand is '" << subcommand << "'\n";
        return kExitConfig;
      }
      cfg.experiment = *requested;
    }
    std::string dir = out.empty() ? cfg.output_dir : out;
    if (dir.empty()) {
      std::cerr << "error: no output directory (use --out or output_dir)\n";
      return kExitConfig;
    }
    validate(cfg);
    const RunOutcome outcome = run_experiment(cfg, dir);
    std::cout << experiment_name(cfg.experiment) << ": " << outcome.status << " -> " << dir << "/manifest.json\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elite persuasion solvers under majority rule"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out;
  std::vector<std::string> overrides;
  std::string chosen;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve-single2p", "two-period single-elite closed form"},
      {"solve-single", "infinite-horizon single elite (value iteration)"},
      {"solve-stackelberg", "two-period leader/follower game"},
      {"solve-mpe", "alternating-move Markov-perfect equilibrium"},
      {"sweep", "cartesian sweep over sweep.<axis> lines"},
      {"oracle-check", "closed forms against brute-force oracles"},
      {"run", "whatever the config's experiment key names"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--override", overrides, "key=value, repeatable");
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : polarsolve::kExitConfig;
  }
  return run(chosen, config_path, out, overrides);
}
