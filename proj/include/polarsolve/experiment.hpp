#pragma once

// Experiment orchestration: runs one configured solve (or a sweep of them),
// writes CSV/JSON artifacts and a manifest.json describing the run.

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "polarsolve/config.hpp"
#include "polarsolve/io.hpp"
#include "polarsolve/oracle_check.hpp"
#include "polarsolve/parallel.hpp"
#include "polarsolve/single_elite.hpp"
#include "polarsolve/two_elite.hpp"

namespace polarsolve {

inline constexpr const char* kVersion = "polarsolve 1.0.0";

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitConfig = 2, kExitSolver = 3 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status = "ok";
  nlohmann::json manifest;
};

namespace detail {

/// JSON has no infinity; unbounded thresholds are written as null.
inline nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

inline nlohmann::json config_echo(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = std::string(experiment_name(cfg.experiment));
  j["label"] = cfg.label;
  j["pi"] = cfg.params.pi;
  j["beta"] = cfg.params.beta;
  j["H"] = cfg.params.H;
  j["cost"] = cfg.cost.kind;
  j["k"] = cfg.cost.k;
  if (cfg.cost.kind == "power") j["cost_exponent"] = cfg.cost.exponent;
  if (cfg.cost.kind == "tabulated") j["cost_table"] = cfg.cost.table_path;
  j["grid_n"] = cfg.effective_grid_n();
  j["tol"] = cfg.effective_tol();
  switch (cfg.solver()) {
    case Experiment::SolveMpe: j["horizon"] = cfg.horizon; break;
    case Experiment::SolveSingleInfinite: j["max_iter"] = cfg.max_iter; break;
    case Experiment::OracleCheck:
      j["oracle_n"] = cfg.oracle_n;
      j["scan_n"] = cfg.scan_n;
      break;
    default: break;
  }
  if (cfg.experiment == Experiment::Sweep) {
    j["sweep_experiment"] = std::string(experiment_name(cfg.sweep_experiment));
    j["sweep_cap"] = cfg.sweep_cap;
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& ax : cfg.sweep_axes) axes.push_back({{"name", ax.name}, {"values", ax.values}});
    j["sweep_axes"] = axes;
  }
  return j;
}

/// Artifacts written by a run, relative to its output directory.
class ArtifactLog {
 public:
  explicit ArtifactLog(std::filesystem::path root) : root_(std::move(root)) {}

  void csv(const std::string& name, const CsvTable& t) { text(name, to_csv(t)); }
  void json_file(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }

  void text(const std::string& name, const std::string& body) {
    write_text(root_ / name, body);
    add(name, body);
  }

  /// Registers an already-written file (e.g. from a sweep combination).
  void existing(const std::string& name) { add(name, read_text(root_ / name)); }

  [[nodiscard]] nlohmann::json listing() const { return entries_; }
  [[nodiscard]] const std::filesystem::path& root() const { return root_; }

 private:
  void add(const std::string& name, const std::string& body) {
    entries_.push_back({{"file", name}, {"sha256", sha256_hex(body)}, {"bytes", body.size()}});
  }

  std::filesystem::path root_;
  nlohmann::json entries_ = nlohmann::json::array();
};

inline nlohmann::json candidate_json(const std::vector<CandidateEvaluation>& cands) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cands) {
    arr.push_back({{"provenance", to_string(c.provenance)},
                   {"candidate", c.candidate},
                   {"objective", number_or_null(c.objective)},
                   {"feasible", c.feasible}});
  }
  return arr;
}

struct SolveReport {
  nlohmann::json diagnostics = nlohmann::json::object();
  std::string status = "ok";
  int exit_code = kExitOk;
};

inline SolveReport run_single_two_period(const ExperimentConfig& cfg, ArtifactLog& log) {
  const CostSpec cost = cfg.cost.build();
  const Grid grid(cfg.effective_grid_n());
  const RegionPartition regions = make_regions(cfg.params, cost);
  ValueTable values = ValueTable::constant(grid.size(), 0.0);
  nlohmann::json rows = nlohmann::json::array();
  std::array<std::vector<double>, 2> chosen{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (Binary s = 0; s < 2; ++s) {
      const Period1Result r = period1_solve(cfg.params, cost, grid[i], s);
      chosen[s][i] = r.p_next;
      values.v[s][i] = r.value;
      rows.push_back({{"p", grid[i]}, {"s", s}, {"chosen", r.p_next}, {"value", r.value},
                      {"candidates", candidate_json(r.candidates)}});
    }
  }
  // Period-1 choices are continuous, so they are written as shares rather
  // than snapped to grid indices.
  log.csv("policy.csv", grid_table(grid, {"p", "sigma_s0", "sigma_s1"}, {&chosen[0], &chosen[1]}));
  log.csv("value.csv", single_value_table(grid, values));
  nlohmann::json doc;
  doc["cutoffs"] = {{"delta", number_or_null(regions.delta)},
                    {"p0_star", number_or_null(regions.p0_star)},
                    {"p1_star", number_or_null(regions.p1_star)}};
  doc["rows"] = rows;
  log.json_file("candidates.json", doc);
  SolveReport rep;
  rep.diagnostics["delta"] = number_or_null(regions.delta);
  return rep;
}

inline SolveReport run_single_infinite(const ExperimentConfig& cfg, ArtifactLog& log, unsigned threads) {
  const CostSpec cost = cfg.cost.build();
  const Grid grid(cfg.effective_grid_n());
  SolveOptions opts;
  opts.tol = cfg.effective_tol();
  opts.max_iter = cfg.max_iter;
  opts.threads = threads;
  const InfiniteSolution sol = solve_infinite(cfg.params, cost, grid, opts);
  log.csv("policy.csv", single_policy_table(grid, sol.policy));
  log.csv("value.csv", single_value_table(grid, sol.values));
  const auto violations = verify_polarization_pull(grid, sol.values, sol.policy);
  SolveReport rep;
  rep.diagnostics["iterations"] = sol.iterations;
  rep.diagnostics["residual"] = sol.residual;
  rep.diagnostics["converged"] = sol.converged;
  rep.diagnostics["pull_violations"] = violations.size();
  rep.diagnostics["intervention_measure"] = {intervention_measure(sol.policy, 0), intervention_measure(sol.policy, 1)};
  if (!sol.converged) {
    rep.status = "not_converged";
    rep.exit_code = kExitSolver;
  }
  return rep;
}

inline SolveReport run_stackelberg(const ExperimentConfig& cfg, ArtifactLog& log) {
  const CostSpec cost = cfg.cost.build();
  const Grid grid(cfg.effective_grid_n());
  std::array<std::vector<double>, 2> chosen, value, response;
  for (Binary s = 0; s < 2; ++s) {
    chosen[s].resize(grid.size());
    value[s].resize(grid.size());
    response[s].resize(grid.size());
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (Binary s = 0; s < 2; ++s) {
      const StackelbergSolution r = stackelberg_solve(cfg.params, cost, grid[i], s);
      chosen[s][i] = r.chosen;
      value[s][i] = r.value;
      rows.push_back({{"p0", grid[i]}, {"s1", s}, {"chosen", r.chosen}, {"value", r.value},
                      {"phi", r.phi_at_p0}, {"candidates", candidate_json(r.candidates)}});
    }
    // Elite B's period-2 response from p1 = grid[i].
    for (Binary s = 0; s < 2; ++s) response[s][i] = elite_b_response(cfg.params, cost, grid[i], s);
  }
  log.csv("policy.csv", grid_table(grid, {"p", "sigma_s0", "sigma_s1"}, {&chosen[0], &chosen[1]}));
  log.csv("value.csv", grid_table(grid, {"p", "v_s0", "v_s1"}, {&value[0], &value[1]}));
  log.csv("response.csv", grid_table(grid, {"p", "sigmaB_s0", "sigmaB_s1"}, {&response[0], &response[1]}));
  const double delta = delta_threshold(cost, cfg.params.H);
  log.json_file("candidates.json", {{"delta", number_or_null(delta)}, {"rows", rows}});
  SolveReport rep;
  rep.diagnostics["delta"] = number_or_null(delta);
  return rep;
}

inline SolveReport run_mpe(const ExperimentConfig& cfg, ArtifactLog& log, unsigned threads) {
  const CostSpec cost = cfg.cost.build();
  const Grid grid(cfg.effective_grid_n());
  MpeOptions opts;
  opts.horizon = cfg.horizon;
  opts.residual_tol = cfg.effective_tol();
  opts.threads = threads;
  const MpeSolution sol = mpe_solve(cfg.params, cost, grid, opts);
  log.csv("policy.csv", mpe_policy_table(sol));
  log.csv("value.csv", mpe_value_table(sol));
  SolveReport rep;
  rep.diagnostics["iterations"] = sol.horizon_used;
  rep.diagnostics["residual"] = sol.residual;
  rep.diagnostics["stationary"] = sol.converged;
  rep.diagnostics["cycle_period"] = sol.cycle_period;
  rep.diagnostics["cycle_residual"] = sol.cycle_residual;
  const auto absorbing = absorbing_inaction_points(sol);
  rep.diagnostics["absorbing_points"] = absorbing.size();
  if (sol.converged) {
    const DeviationReport dev = check_no_deviation(cfg.params, cost, sol);
    rep.diagnostics["deviation_gain"] = dev.max_gain;
  }
  if (sol.cycle_period == 0) {
    rep.status = "not_converged";
    rep.exit_code = kExitSolver;
  }
  return rep;
}

inline SolveReport run_oracle_check(const ExperimentConfig& cfg, ArtifactLog& log) {
  const CostSpec cost = cfg.cost.build();
  const Grid scan(cfg.scan_n);
  const Grid oracle_grid(cfg.oracle_n);
  try {
    require_aligned(scan, oracle_grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("oracle_n", detail::where(cfg, "oracle_n") + ": field 'oracle_n': " + e.what());
  }
  std::vector<OracleRow> rows = check_period2(cfg.params, cost, scan, oracle_grid);
  auto append = [&](std::vector<OracleRow> more) { rows.insert(rows.end(), more.begin(), more.end()); };
  append(check_period1(cfg.params, cost, scan, oracle_grid));
  append(check_stackelberg(cfg.params, cost, scan, oracle_grid));

  CsvTable t;
  t.header = {"check", "s", "p", "closed_value", "oracle_value", "value_diff", "closed_argmax", "oracle_argmax", "ok"};
  for (const auto& r : rows) {
    t.rows.push_back({to_string(r.check), std::to_string(r.s), format_number(r.p), format_number(r.closed_value),
                      format_number(r.oracle_value), format_number(r.value_diff()), format_number(r.closed_argmax),
                      format_number(r.oracle_argmax), r.ok() ? "1" : "0"});
  }
  log.csv("oracle_report.csv", t);

  SolveReport rep;
  std::size_t failures = 0;
  for (OracleCheck c : {OracleCheck::Period2, OracleCheck::Period1, OracleCheck::Stackelberg}) {
    const OracleSummary s = summarize(c, rows);
    failures += s.failures;
    rep.diagnostics[to_string(c)] = {{"rows", s.rows},
                                     {"failures", s.failures},
                                     {"max_value_diff", s.max_value_diff},
                                     {"max_argmax_diff", s.max_argmax_diff},
                                     {"value_tolerance", oracle_value_tolerance(c)}};
  }
  if (failures > 0) {
    rep.status = "oracle_mismatch";
    rep.exit_code = kExitSolver;
  }
  return rep;
}

inline SolveReport run_single(const ExperimentConfig& cfg, ArtifactLog& log, unsigned threads) {
  switch (cfg.experiment) {
    case Experiment::SolveSingleTwoPeriod: return run_single_two_period(cfg, log);
    case Experiment::SolveSingleInfinite: return run_single_infinite(cfg, log, threads);
    case Experiment::SolveStackelberg: return run_stackelberg(cfg, log);
    case Experiment::SolveMpe: return run_mpe(cfg, log, threads);
    case Experiment::OracleCheck: return run_oracle_check(cfg, log);
    case Experiment::Sweep: break;
  }
  throw ConfigError("experiment", "sweep cannot be nested");
}

inline void write_manifest(ArtifactLog& log, const ExperimentConfig& cfg, const SolveReport& rep, double wall) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["experiment"] = std::string(experiment_name(cfg.experiment));
  m["config"] = config_echo(cfg);
  m["status"] = rep.status;
  nlohmann::json diag = rep.diagnostics;
  diag["wall_time_s"] = wall;
  m["diagnostics"] = diag;
  m["artifacts"] = log.listing();
  write_text(log.root() / "manifest.json", m.dump(2) + "\n");
}

inline std::string combo_name(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "combo_%03zu", id);
  return buf;
}

inline std::string axis_value_text(const std::string& axis, double v) {
  if (axis == "grid_n" || axis == "horizon") return std::to_string(static_cast<std::size_t>(v));
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::size_t sweep_size(const ExperimentConfig& cfg) {
  std::size_t n = 1;
  for (const auto& ax : cfg.sweep_axes) n *= ax.values.size();
  return n;
}

/// The combination with the given id; the last axis varies fastest.
inline ExperimentConfig sweep_combination(const ExperimentConfig& cfg, std::size_t id) {
  ExperimentConfig c = cfg;
  c.experiment = cfg.sweep_experiment;
  c.sweep_axes.clear();
  std::size_t rest = id;
  for (auto ax = cfg.sweep_axes.rbegin(); ax != cfg.sweep_axes.rend(); ++ax) {
    set_numeric(c, ax->name, ax->values[rest % ax->values.size()]);
    rest /= ax->values.size();
  }
  return c;
}

inline RunOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                 unsigned threads = default_threads());

namespace detail {

inline SolveReport run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, unsigned threads,
                             ArtifactLog& log) {
  const std::size_t n = sweep_size(cfg);
  std::vector<RunOutcome> outcomes(n);
  std::vector<std::string> errors(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  // Leftover threads go to the solvers inside each combination.
  const unsigned inner = std::max(1u, threads / workers);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t id = next++; id < n; id = next++) {
      try {
        outcomes[id] = run_experiment(sweep_combination(cfg, id), out_dir / combo_name(id), inner);
      } catch (const std::exception& e) {
        errors[id] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t id = 0; id < n; ++id) {
    if (!errors[id].empty()) throw IoError(combo_name(id) + ": " + errors[id]);
  }

  CsvTable index;
  index.header.push_back("combo");
  for (const auto& ax : cfg.sweep_axes) index.header.push_back(ax.name);
  index.header.insert(index.header.end(), {"directory", "status", "policy_csv", "value_csv"});
  SolveReport rep;
  nlohmann::json statuses = nlohmann::json::array();
  for (std::size_t id = 0; id < n; ++id) {
    const ExperimentConfig c = sweep_combination(cfg, id);
    std::vector<std::string> row{std::to_string(id)};
    std::size_t rest = id;
    std::vector<std::string> vals(cfg.sweep_axes.size());
    for (std::size_t a = cfg.sweep_axes.size(); a-- > 0;) {
      const auto& ax = cfg.sweep_axes[a];
      vals[a] = axis_value_text(ax.name, ax.values[rest % ax.values.size()]);
      rest /= ax.values.size();
    }
    row.insert(row.end(), vals.begin(), vals.end());
    const std::string dir = combo_name(id);
    const bool has_tables = c.experiment != Experiment::OracleCheck;
    row.insert(row.end(), {dir, outcomes[id].status, has_tables ? dir + "/policy.csv" : "",
                           has_tables ? dir + "/value.csv" : ""});
    index.rows.push_back(std::move(row));
    statuses.push_back(outcomes[id].status);
    if (outcomes[id].exit_code != kExitOk) {
      rep.exit_code = outcomes[id].exit_code;
      rep.status = "combination_failed";
    }
    // Sub-manifests carry wall times, so only their data files are listed.
    for (const auto& a : outcomes[id].manifest["artifacts"]) log.existing(dir + "/" + a["file"].get<std::string>());
  }
  log.csv("index.csv", index);
  rep.diagnostics["combinations"] = n;
  rep.diagnostics["combination_status"] = statuses;
  return rep;
}

}  // namespace detail

/// Runs the configured experiment into `out_dir` (created if missing).
/// Throws ConfigError for invalid configs and IoError for filesystem trouble.
inline RunOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, unsigned threads) {
  validate(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto start = std::chrono::steady_clock::now();
  detail::ArtifactLog log(out_dir);
  detail::SolveReport rep;
  if (cfg.experiment == Experiment::Sweep) {
    rep = detail::run_sweep(cfg, out_dir, threads, log);
  } else {
    rep = detail::run_single(cfg, log, threads);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_manifest(log, cfg, rep, wall);
  RunOutcome out;
  out.exit_code = rep.exit_code;
  out.status = rep.status;
  out.manifest = nlohmann::json::parse(read_text(out_dir / "manifest.json"));
  return out;
}

}  // namespace polarsolve
