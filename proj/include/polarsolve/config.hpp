#pragma once

// Experiment configuration: a flat `key = value` text format.
//
//   # comment
//   experiment = solve-single
//   pi = 0.5            # Pr(s = 1)
//   beta = 0.9          # discount factor
//   H = 1               # utils per period of implementing the preferred policy
//   cost = quadratic    # quadratic | power | tabulated
//   k = 10              # cost curvature
//   grid_n = 1001
//   sweep.k = 0.5, 10, 200
//
// Every key is documented in README.md. Unknown keys, malformed numbers and
// out-of-range values raise ConfigError naming the field and line.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "polarsolve/model.hpp"

namespace polarsolve {

enum class Experiment { SolveSingleTwoPeriod, SolveSingleInfinite, SolveStackelberg, SolveMpe, Sweep, OracleCheck };

inline constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::SolveSingleTwoPeriod, "solve-single2p"},
    {Experiment::SolveSingleInfinite, "solve-single"},
    {Experiment::SolveStackelberg, "solve-stackelberg"},
    {Experiment::SolveMpe, "solve-mpe"},
    {Experiment::Sweep, "sweep"},
    {Experiment::OracleCheck, "oracle-check"},
};

inline std::string_view experiment_name(Experiment e) {
  for (const auto& [id, name] : kExperimentNames) {
    if (id == e) return name;
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [id, n] : kExperimentNames) {
    if (n == name) return id;
  }
  return std::nullopt;
}

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Which cost function to build and with what parameters.
struct CostDescriptor {
  std::string kind = "quadratic";  // quadratic | power | tabulated
  double k = 10.0;
  double exponent = 2.0;   // power kind only
  std::string table_path;  // tabulated kind only: 2001 values, one per line

  [[nodiscard]] CostSpec build() const {
    if (kind == "quadratic") return CostSpec::quadratic(k);
    if (kind == "power") return CostSpec::power(k, exponent);
    std::ifstream in(table_path);
    if (!in) throw ConfigError("cost_table", "cannot open cost table '" + table_path + "'");
    std::vector<double> values;
    double x = 0.0;
    while (in >> x) values.push_back(x);
    try {
      return CostSpec::tabulated(std::move(values));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("cost_table", std::string("cost table '") + table_path + "': " + e.what());
    }
  }
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

inline constexpr std::string_view kSweepableKeys[] = {"k", "pi", "beta", "H", "grid_n", "horizon"};

struct ExperimentConfig {
  Experiment experiment = Experiment::SolveSingleInfinite;
  std::string label;
  ModelParams params{};
  CostDescriptor cost{};
  std::size_t grid_n = 0;  // 0: experiment default
  std::size_t horizon = 600;
  std::optional<double> tol;  // default 1e-10 single-elite, 1e-9 MPE
  std::size_t max_iter = 10000;
  std::size_t oracle_n = 2001;
  std::size_t scan_n = 201;
  Experiment sweep_experiment = Experiment::SolveSingleInfinite;
  std::vector<SweepAxis> sweep_axes;
  std::size_t sweep_cap = 256;
  std::string output_dir;

  std::map<std::string, std::string> sources;  // field -> "file:line" for diagnostics

  [[nodiscard]] Experiment solver() const { return experiment == Experiment::Sweep ? sweep_experiment : experiment; }

  [[nodiscard]] std::size_t effective_grid_n() const {
    if (grid_n != 0) return grid_n;
    switch (solver()) {
      case Experiment::SolveMpe: return 501;
      case Experiment::SolveSingleInfinite: return 1001;
      default: return 201;
    }
  }

  [[nodiscard]] double effective_tol() const {
    if (tol) return *tol;
    return solver() == Experiment::SolveMpe ? 1e-9 : 1e-10;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string where(const ExperimentConfig& cfg, const std::string& field) {
  const auto it = cfg.sources.find(field);
  return it == cfg.sources.end() ? std::string("config") : it->second;
}

[[noreturn]] inline void fail(const ExperimentConfig& cfg, const std::string& field, const std::string& what) {
  throw ConfigError(field, where(cfg, field) + ": field '" + field + "': " + what);
}

inline double parse_double(const ExperimentConfig& cfg, const std::string& field, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) fail(cfg, field, "expected a number, got '" + text + "'");
  return v;
}

inline std::size_t parse_count(const ExperimentConfig& cfg, const std::string& field, const std::string& text) {
  std::size_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail(cfg, field, "expected a non-negative integer, got '" + text + "'");
  return v;
}

inline std::size_t as_count(const ExperimentConfig& cfg, const std::string& field, double v) {
  if (!(v >= 0.0) || v != std::floor(v)) fail(cfg, field, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline Experiment parse_experiment_field(const ExperimentConfig& cfg, const std::string& field,
                                         const std::string& text) {
  const auto e = parse_experiment(text);
  if (!e) fail(cfg, field, "unknown experiment '" + text + "'");
  return *e;
}

}  // namespace detail

/// Assigns one numeric sweepable parameter.
inline void set_numeric(ExperimentConfig& cfg, const std::string& key, double v) {
  if (key == "k") cfg.cost.k = v;
  else if (key == "pi") cfg.params.pi = v;
  else if (key == "beta") cfg.params.beta = v;
  else if (key == "H") cfg.params.H = v;
  else if (key == "grid_n") cfg.grid_n = detail::as_count(cfg, key, v);
  else if (key == "horizon") cfg.horizon = detail::as_count(cfg, key, v);
  else detail::fail(cfg, key, "not a sweepable parameter");
}

/// Applies `key = value`; `source` names the origin for diagnostics.
inline void set_field(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& source) {
  cfg.sources[key] = source;
  using detail::parse_count;
  using detail::parse_double;
  if (key == "experiment") cfg.experiment = detail::parse_experiment_field(cfg, key, value);
  else if (key == "label") cfg.label = value;
  else if (key == "pi" || key == "beta" || key == "H" || key == "k") set_numeric(cfg, key, parse_double(cfg, key, value));
  else if (key == "cost") cfg.cost.kind = value;
  else if (key == "cost_exponent") cfg.cost.exponent = parse_double(cfg, key, value);
  else if (key == "cost_table") cfg.cost.table_path = value;
  else if (key == "grid_n") cfg.grid_n = parse_count(cfg, key, value);
  else if (key == "horizon") cfg.horizon = parse_count(cfg, key, value);
  else if (key == "tol") cfg.tol = parse_double(cfg, key, value);
  else if (key == "max_iter") cfg.max_iter = parse_count(cfg, key, value);
  else if (key == "oracle_n") cfg.oracle_n = parse_count(cfg, key, value);
  else if (key == "scan_n") cfg.scan_n = parse_count(cfg, key, value);
  else if (key == "sweep_experiment") cfg.sweep_experiment = detail::parse_experiment_field(cfg, key, value);
  else if (key == "sweep_cap") cfg.sweep_cap = parse_count(cfg, key, value);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key.rfind("sweep.", 0) == 0) {
    const std::string axis = key.substr(6);
    if (std::find(std::begin(kSweepableKeys), std::end(kSweepableKeys), axis) == std::end(kSweepableKeys)) {
      detail::fail(cfg, key, "sweep axis must be one of k, pi, beta, H, grid_n, horizon");
    }
    SweepAxis ax{axis, {}};
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) ax.values.push_back(parse_double(cfg, key, detail::trim(item)));
    if (ax.values.empty()) detail::fail(cfg, key, "sweep axis needs at least one value");
    const auto it = std::find_if(cfg.sweep_axes.begin(), cfg.sweep_axes.end(),
                                 [&](const SweepAxis& a) { return a.name == axis; });
    if (it != cfg.sweep_axes.end()) *it = std::move(ax);
    else cfg.sweep_axes.push_back(std::move(ax));
  } else {
    detail::fail(cfg, key, "unknown key");
  }
}

/// Range checks for every field; throws ConfigError naming the first bad one.
inline void validate(const ExperimentConfig& cfg) {
  using detail::fail;
  if (!(cfg.params.pi > 0.0 && cfg.params.pi < 1.0)) fail(cfg, "pi", "must lie in (0,1)");
  if (!(cfg.params.beta > 0.0 && cfg.params.beta < 1.0)) fail(cfg, "beta", "must lie in (0,1)");
  if (!(cfg.params.H > 0.0)) fail(cfg, "H", "must be > 0");
  if (cfg.cost.kind != "quadratic" && cfg.cost.kind != "power" && cfg.cost.kind != "tabulated") {
    fail(cfg, "cost", "must be quadratic, power or tabulated");
  }
  if (cfg.cost.kind == "quadratic" && !(cfg.cost.k >= 0.0)) fail(cfg, "k", "must be >= 0");
  if (cfg.cost.kind == "power") {
    if (!(cfg.cost.k > 0.0)) fail(cfg, "k", "must be > 0 for a power cost");
    if (!(cfg.cost.exponent > 1.0)) fail(cfg, "cost_exponent", "must be > 1");
  }
  if (cfg.cost.kind == "tabulated" && cfg.cost.table_path.empty()) fail(cfg, "cost_table", "required for tabulated cost");
  if (cfg.grid_n != 0 && (cfg.grid_n < 3 || cfg.grid_n % 2 == 0)) fail(cfg, "grid_n", "must be odd and >= 3");
  if (cfg.horizon < 2) fail(cfg, "horizon", "must be >= 2");
  if (cfg.tol && !(*cfg.tol > 0.0)) fail(cfg, "tol", "must be > 0");
  if (cfg.max_iter == 0) fail(cfg, "max_iter", "must be >= 1");
  if (cfg.oracle_n < 3 || cfg.oracle_n % 2 == 0) fail(cfg, "oracle_n", "must be odd and >= 3");
  if (cfg.scan_n < 3 || cfg.scan_n % 2 == 0) fail(cfg, "scan_n", "must be odd and >= 3");
  if (cfg.sweep_experiment == Experiment::Sweep) fail(cfg, "sweep_experiment", "cannot itself be a sweep");
  if (cfg.experiment == Experiment::Sweep) {
    if (cfg.sweep_axes.empty()) fail(cfg, "experiment", "a sweep needs at least one sweep.<axis> line");
    std::size_t combos = 1;
    for (const auto& ax : cfg.sweep_axes) combos *= ax.values.size();
    if (combos > cfg.sweep_cap) {
      fail(cfg, "sweep_cap", std::to_string(combos) + " combinations exceed the cap of " + std::to_string(cfg.sweep_cap));
    }
    // Every combination must itself be valid.
    for (const auto& ax : cfg.sweep_axes) {
      for (double v : ax.values) {
        ExperimentConfig probe = cfg;
        probe.experiment = cfg.sweep_experiment;
        probe.sweep_axes.clear();
        probe.sources[ax.name] = detail::where(cfg, "sweep." + ax.name);
        try {
          set_numeric(probe, ax.name, v);
          validate(probe);
        } catch (const ConfigError& e) {
          throw ConfigError("sweep." + ax.name, detail::where(cfg, "sweep." + ax.name) + ": field 'sweep." + ax.name +
                                                     "': value " + std::to_string(v) + " invalid (" + e.what() + ")");
        }
      }
    }
  } else if (!cfg.sweep_axes.empty()) {
    fail(cfg, "experiment", "sweep.<axis> lines require experiment = sweep");
  }
}

inline ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name = "config") {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw ConfigError("", where + ": expected 'key = value', got '" + body + "'");
    }
    set_field(cfg, detail::trim(std::string_view(body).substr(0, eq)),
              detail::trim(std::string_view(body).substr(eq + 1)), where);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

/// `key=value` from the command line.
inline void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override", "--override: expected key=value, got '" + std::string(assignment) + "'");
  }
  set_field(cfg, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)), "--override");
}

}  // namespace polarsolve
