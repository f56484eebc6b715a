#pragma once

// Scenario runner behind the plab tool: INI configuration, dispatch to the
// lab operations, CSV/JSON emission. Artifacts are a pure function of the
// resolved settings, so identical settings give identical bytes.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "plab/attractor.hpp"
#include "plab/verify.hpp"

namespace plab::scenario {

using json = nlohmann::json;

struct KeyDef {
  const char* section;
  const char* key;
  const char* fallback;
};

// Key names are unique across sections so each doubles as a flag name.
inline const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> keys{
      {"scenario", "kind", "equilibria"},
      {"grid", "n", "63"},
      {"time", "dt", "0.001"},
      {"time", "t_start", "0"},
      {"time", "t_end", "1"},
      {"time", "stride", "1"},
      {"time", "t_min", "0"},
      {"time", "t_max", "1"},
      {"time", "sample_times", "0"},
      {"time", "checkpoints", "0, 5, 10, 20"},
      {"profile", "b", "constant(1)"},
      {"profile", "omega", "constant(0)"},
      {"profile", "b0", ""},
      {"profile", "b1", ""},
      {"profile", "omega0", ""},
      {"profile", "omega1", ""},
      {"selection", "policy", "upper"},
      {"selection", "policies", "upper, lower, zero, random_switch"},
      {"selection", "initial", "zero"},
      {"sampling", "n_seeds", "20"},
      {"sampling", "seed", "1"},
      {"sampling", "depth_first", "5"},
      {"sampling", "depth_count", "5"},
      {"sampling", "probe_depths", "5, 10, 20, 40"},
      {"tolerances", "tol", "1e-8"},
      {"output", "out", "out"},
      {"output", "format", "csv"},
      {"output", "jobs", "1"},
  };
  return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double to_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(field + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

inline std::uint64_t to_u64(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(field + ": expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

inline std::vector<double> to_doubles(const std::string& text, const std::string& field) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item, field));
  return out;
}

/// `name(args)` -> {name, args}; throws unless the parentheses close the text.
inline std::pair<std::string, std::string> call_syntax(const std::string& text,
                                                       const std::string& field) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') {
    throw ConfigError(field + ": expected name(arguments), got '" + text + "'");
  }
  return {trim(t.substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
}

inline ScalarLaw parse_law(const std::string& text, const std::string& field) {
  const auto [name, args] = call_syntax(text, field);
  if (name == "constant") {
    const auto v = to_doubles(args, field);
    if (v.size() != 1) throw ConfigError(field + ": constant takes one argument");
    return Constant{v[0]};
  }
  if (name == "exp_approach") {
    const auto v = to_doubles(args, field);
    if (v.size() != 4) {
      throw ConfigError(field + ": exp_approach takes (limit, amplitude, rate, t_ref)");
    }
    return ExpApproach{v[0], v[1], v[2], v[3]};
  }
  if (name == "table") {
    Table tab;
    for (const auto& item : split(args, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError(field + ": table knots are t:value pairs");
      tab.knots.push_back({to_double(item.substr(0, colon), field),
                           to_double(item.substr(colon + 1), field)});
    }
    if (tab.knots.empty()) throw ConfigError(field + ": table needs at least one knot");
    return tab;
  }
  throw ConfigError(field + ": unknown profile law '" + name + "'");
}

/// Range a law can take when no bounds are declared.
inline std::pair<double, double> natural_range(const ScalarLaw& law) {
  if (auto c = std::get_if<Constant>(&law)) return {c->value, c->value};
  if (auto e = std::get_if<ExpApproach>(&law)) {
    return {std::min(e->limit, e->limit + e->amplitude), std::max(e->limit, e->limit + e->amplitude)};
  }
  const auto& k = std::get<Table>(law).knots;
  const auto [lo, hi] = std::minmax_element(k.begin(), k.end(),
                                            [](const Knot& a, const Knot& b) { return a.value < b.value; });
  return {lo->value, hi->value};
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Resolved settings: every key of key_table with its value text.
class Settings {
 public:
  Settings() {
    for (const auto& k : key_table()) values_.emplace_back(k.key, k.fallback);
  }

  /// Accepts `key` or `section.key`.
  void set(std::string_view name, std::string value) {
    const auto dot = name.find('.');
    const std::string_view section = dot == name.npos ? std::string_view{} : name.substr(0, dot);
    const std::string_view key = dot == name.npos ? name : name.substr(dot + 1);
    const auto& table = key_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (key != table[i].key) continue;
      if (!section.empty() && section != table[i].section) break;
      values_[i].second = detail::trim(value);
      return;
    }
    throw ConfigError("unknown configuration key '" + std::string(name) + "'");
  }

  const std::string& get(std::string_view key) const {
    for (const auto& [k, v] : values_) {
      if (k == key) return v;
    }
    throw UsageError("Settings::get: no key " + std::string(key));
  }

  /// {"section": {"key": "value"}}; the provenance echo. The output directory
  /// is left out so artifacts do not depend on where they are written.
  json echo() const {
    json out = json::object();
    const auto& table = key_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (std::string_view(table[i].key) == "out") continue;
      out[table[i].section][table[i].key] = values_[i].second;
    }
    return out;
  }

  friend bool operator==(const Settings&, const Settings&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> values_;
};

/// Merges an INI document into `s`. Syntax errors name the line.
inline void merge_ini(Settings& s, std::istream& in, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (!body.data().empty()) throw ConfigError(source + ": key '" + section + "' outside a section");
      continue;
    }
    for (const auto& [key, node] : body) {
      try {
        s.set(section + "." + key, node.data());
      } catch (const ConfigError& e) {
        throw ConfigError(source + ": [" + section + "] " + e.what());
      }
    }
  }
}

inline void merge_ini_file(Settings& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  merge_ini(s, in, path.string());
}

enum class Kind { equilibria, simulate, extremal, pullback, asymptotic, verify };

inline const std::vector<std::pair<Kind, std::string>>& kind_names() {
  static const std::vector<std::pair<Kind, std::string>> names{
      {Kind::equilibria, "equilibria"}, {Kind::simulate, "simulate"},
      {Kind::extremal, "extremal"},     {Kind::pullback, "pullback"},
      {Kind::asymptotic, "asymptotic"}, {Kind::verify, "verify"}};
  return names;
}

inline Kind parse_kind(const std::string& text) {
  for (const auto& [k, name] : kind_names()) {
    if (name == text) return k;
  }
  throw ConfigError("kind: unknown scenario '" + text + "'");
}

/// Typed view of Settings; every field has passed its local checks.
struct Config {
  Settings settings;
  Kind kind = Kind::equilibria;
  GridSpec grid{63};
  double dt = 1e-3;
  double t_start = 0.0, t_end = 1.0;
  std::size_t stride = 1;
  Window window{0.0, 1.0};
  std::vector<double> sample_times;
  std::vector<double> checkpoints;
  CoefficientProfile profile = CoefficientProfile::constant(1.0, 0.0);
  SelectionPolicy policy;
  std::string initial;
  SamplingConfig sampling;
  std::vector<double> probe_depths;
  std::filesystem::path out;
  bool write_csv = true, write_json = false;
};

inline Config resolve(const Settings& s) {
  using detail::to_double;
  using detail::to_u64;
  Config c;
  c.settings = s;
  c.kind = parse_kind(s.get("kind"));
  const auto n = to_u64(s.get("n"), "n");
  if (n == 0) throw ConfigError("n: need at least one interior node");
  c.grid = GridSpec(n);
  c.dt = to_double(s.get("dt"), "dt");
  if (!(c.dt > 0.0)) throw ConfigError("dt: must be positive");
  c.t_start = to_double(s.get("t_start"), "t_start");
  c.t_end = to_double(s.get("t_end"), "t_end");
  if (!(c.t_start <= c.t_end)) throw ConfigError("t_end: must not precede t_start");
  c.stride = to_u64(s.get("stride"), "stride");
  if (c.stride == 0) throw ConfigError("stride: must be positive");
  c.window = {to_double(s.get("t_min"), "t_min"), to_double(s.get("t_max"), "t_max")};
  if (!(c.window.t_min <= c.window.t_max)) throw ConfigError("t_max: must not precede t_min");
  c.sample_times = detail::to_doubles(s.get("sample_times"), "sample_times");
  if (c.sample_times.empty()) throw ConfigError("sample_times: need at least one time");
  c.checkpoints = detail::to_doubles(s.get("checkpoints"), "checkpoints");
  if (c.checkpoints.empty() || !std::is_sorted(c.checkpoints.begin(), c.checkpoints.end())) {
    throw ConfigError("checkpoints: need a nonempty sorted list");
  }

  const auto b_law = detail::parse_law(s.get("b"), "b");
  const auto w_law = detail::parse_law(s.get("omega"), "omega");
  auto bound = [&](const char* key, double fallback) {
    const auto& text = s.get(key);
    return text.empty() ? fallback : to_double(text, key);
  };
  const auto [b_lo, b_hi] = detail::natural_range(b_law);
  const auto [w_lo, w_hi] = detail::natural_range(w_law);
  c.profile = CoefficientProfile(b_law, w_law, bound("b0", b_lo), bound("b1", b_hi),
                                 bound("omega0", w_lo), bound("omega1", w_hi));
  c.profile.set_asymptotic_limits(*plab::detail::law_limit(b_law), *plab::detail::law_limit(w_law));

  const auto seed = to_u64(s.get("seed"), "seed");
  try {
    c.policy = parse_policy(s.get("policy"), seed);
    c.sampling.policies.clear();
    for (const auto& p : detail::split(s.get("policies"), ',')) {
      c.sampling.policies.push_back(parse_policy(p, seed));
    }
  } catch (const UsageError& e) {
    throw ConfigError(std::string("selection: ") + e.what());
  }
  if (c.sampling.policies.empty()) throw ConfigError("policies: need at least one policy");
  c.initial = s.get("initial");

  c.sampling.n_seeds = to_u64(s.get("n_seeds"), "n_seeds");
  if (c.sampling.n_seeds == 0) throw ConfigError("n_seeds: must be positive");
  c.sampling.seed = seed;
  const double first = to_double(s.get("depth_first"), "depth_first");
  const auto count = to_u64(s.get("depth_count"), "depth_count");
  if (!(first > 0.0) || count < 2) {
    throw ConfigError("depth_first/depth_count: need a positive first depth and at least two depths");
  }
  c.sampling.schedule = HorizonSchedule::doubling(first, count);
  c.sampling.tol = to_double(s.get("tol"), "tol");
  if (!(c.sampling.tol > 0.0)) throw ConfigError("tol: must be positive");
  c.sampling.jobs = to_u64(s.get("jobs"), "jobs");
  if (c.sampling.jobs == 0) throw ConfigError("jobs: must be positive");
  c.probe_depths = detail::to_doubles(s.get("probe_depths"), "probe_depths");

  c.out = s.get("out");
  if (c.out.empty()) throw ConfigError("out: empty output directory");
  const auto& format = s.get("format");
  if (format == "csv") {
    c.write_csv = true, c.write_json = false;
  } else if (format == "json") {
    c.write_csv = false, c.write_json = true;
  } else if (format == "both") {
    c.write_csv = true, c.write_json = true;
  } else {
    throw ConfigError("format: expected csv, json or both, got '" + format + "'");
  }
  return c;
}

/// Numeric table with an optional leading text column.
struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
};

struct Artifact {
  std::string stem;
  DataTable table;
  json meta = json::object();
};

struct Outcome {
  std::vector<Artifact> artifacts;
  json provenance = json::object();
  std::vector<std::string> report;
  int exit_code = 0;
};

inline std::string to_csv(const DataTable& t) {
  std::string out;
  for (std::size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + t.columns[j];
  out += '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    bool first = true;
    if (!t.labels.empty()) {
      out += t.labels[r];
      first = false;
    }
    for (double v : t.rows[r]) {
      if (!first) out += ',';
      out += detail::format_double(v);
      first = false;
    }
    out += '\n';
  }
  return out;
}

inline json to_json(const Artifact& a, const json& provenance) {
  json j;
  j["provenance"] = provenance;
  j["columns"] = a.table.columns;
  if (!a.table.labels.empty()) j["labels"] = a.table.labels;
  j["rows"] = a.table.rows;
  j["meta"] = a.meta;
  return j;
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline DataTable state_table(std::span<const double> times, std::span<const GridFunction> states) {
  DataTable t;
  t.columns.push_back("t");
  const std::size_t n = states.empty() ? 0 : states.front().size();
  for (std::size_t i = 1; i <= n; ++i) t.columns.push_back("x_" + std::to_string(i));
  for (std::size_t k = 0; k < states.size(); ++k) {
    std::vector<double> row{times[k]};
    row.insert(row.end(), states[k].values().begin(), states[k].values().end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline json base_provenance(const Config& c, double dt_used) {
  json p;
  p["config"] = c.settings.echo();
  p["n_interior"] = c.grid.n_interior();
  p["h"] = c.grid.h();
  p["dt"] = dt_used;
  p["requested_dt"] = c.dt;
  p["seeds"] = {{"seed", c.sampling.seed}, {"n_seeds", c.sampling.n_seeds}};
  p["tolerances"] = {{"tol", c.sampling.tol}, {"order_slack", verify::kOrderSlack}};
  p["horizon_used"] = nullptr;
  return p;
}

inline GridFunction initial_state(const Config& c) {
  const auto& text = c.initial;
  if (text == "zero") return GridFunction(c.grid);
  if (text == "v1_plus") return discrete_equilibrium(upper_params(c.profile), c.grid);
  if (text == "v1_minus") return -discrete_equilibrium(upper_params(c.profile), c.grid);
  if (text == "random") return draw_seeds(c.profile, c.grid, 1, c.sampling.seed).front();
  const auto [name, args] = call_syntax(text, "initial");
  if (name == "constant") return GridFunction::constant(c.grid, to_double(args, "initial"));
  throw ConfigError("initial: expected zero, v1_plus, v1_minus, random or constant(c)");
}

inline Outcome run_equilibria(const Config& c) {
  const auto p = upper_params(c.profile);
  const auto closed = positive_equilibrium_closed_form(p, c.grid);
  const auto discrete = discrete_equilibrium(p, c.grid);
  Artifact a{"equilibria", {{"x", "v1_plus", "v1_minus", "v1_plus_discrete"}, {}, {}}, json::object()};
  for (std::size_t i = 0; i < c.grid.n_interior(); ++i) {
    a.table.rows.push_back({c.grid.node(i), closed[i], -closed[i], discrete[i]});
  }
  a.meta["b"] = p.b;
  a.meta["omega"] = p.omega;
  a.meta["stationarity_residual"] = stationarity_residual(closed, p);
  a.meta["discrete_gap"] = sup_distance(closed, discrete);
  Outcome o;
  o.provenance = base_provenance(c, c.dt);
  o.artifacts.push_back(std::move(a));
  return o;
}

inline Outcome run_simulate(const Config& c) {
  const auto tr = integrate(initial_state(c), c.t_start, c.t_end, c.dt, c.profile, c.policy);
  std::vector<double> times;
  std::vector<GridFunction> states;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (k % c.stride == 0 || k + 1 == tr.size()) {
      times.push_back(tr.times()[k]);
      states.push_back(tr.states()[k]);
    }
  }
  Artifact a{"trajectory", state_table(times, states), json::object()};
  a.meta["policy"] = c.policy.name();
  a.meta["initial"] = c.initial;
  a.meta["steps"] = tr.size() - 1;
  a.meta["scheme_residual"] = scheme_residual(tr);
  Outcome o;
  o.provenance = base_provenance(c, tr.dt());
  o.artifacts.push_back(std::move(a));
  return o;
}

inline Outcome run_extremal(const Config& c) {
  const auto pair = extremal_trajectories(c.window, c.dt, c.profile, c.grid, c.sampling.tol,
                                          c.sampling.schedule, c.stride);
  json meta;
  meta["cauchy_gap"] = pair.cauchy_gap;
  meta["gap_history"] = pair.gap_history;
  Outcome o;
  o.provenance = base_provenance(c, pair.dt);
  o.provenance["horizon_used"] = pair.horizon_used;
  o.artifacts.push_back({"gamma_hi", state_table(pair.times, pair.gamma_hi), meta});
  o.artifacts.push_back({"gamma_lo", state_table(pair.times, pair.gamma_lo), meta});
  return o;
}

inline Outcome run_pullback(const Config& c) {
  Artifact a{"attractor", {{"t", "member_id"}, {}, {}}, json::object()};
  for (std::size_t i = 1; i <= c.grid.n_interior(); ++i) a.table.columns.push_back("x_" + std::to_string(i));
  std::vector<AttractorSample> samples;
  json horizons = json::array();
  json gaps = json::array();
  for (double t : c.sample_times) {
    samples.push_back(pullback_attractor_sample(t, c.profile, c.grid, c.dt, c.sampling));
    const auto& s = samples.back();
    for (std::size_t m = 0; m < s.members.size(); ++m) {
      std::vector<double> row{t, static_cast<double>(m)};
      row.insert(row.end(), s.members[m].values().begin(), s.members[m].values().end());
      a.table.rows.push_back(std::move(row));
    }
    horizons.push_back(s.horizon_used);
    gaps.push_back(s.gap_history);
  }
  const auto [lo, hi] = std::minmax_element(c.sample_times.begin(), c.sample_times.end());
  const auto pair = extremal_trajectories({*lo, *hi}, c.dt, c.profile, c.grid, c.sampling.tol,
                                          c.sampling.schedule);
  const auto probe = discrete_equilibrium(upper_params(c.profile), c.grid);
  const auto report = structure_report(pair, samples, lower_params(c.profile),
                                       upper_params(c.profile), c.profile, probe, c.probe_depths);
  json curve = json::array();
  for (const auto& pt : report.attraction_curve) curve.push_back({pt.depth, pt.distance});
  a.meta["policies"] = json::array();
  for (const auto& p : c.sampling.policies) a.meta["policies"].push_back(p.name());
  a.meta["gap_history"] = gaps;
  a.meta["structure"] = {{"sandwich_violation", report.sandwich_violation},
                         {"symmetry_defect", report.symmetry_defect},
                         {"bound_defect_lower", report.bound_defect_lower},
                         {"bound_defect_upper", report.bound_defect_upper},
                         {"attraction_curve", curve},
                         {"gamma_horizon_used", pair.horizon_used}};
  Outcome o;
  o.provenance = base_provenance(c, c.dt);
  o.provenance["horizon_used"] = horizons;
  o.artifacts.push_back(std::move(a));
  return o;
}

inline Outcome run_asymptotic(const Config& c) {
  const EquilibriumParams limit{*c.profile.b_inf(), *c.profile.omega_inf()};
  const auto table =
      asymptotic_experiment(c.profile, limit, c.grid, c.dt, c.checkpoints, c.sampling);
  Artifact a{"convergence", {{"t", "dist_attractor", "dist_gamma"}, {}, {}}, json::object()};
  json horizons = json::array();
  json symmetry = json::array();
  for (const auto& row : table.rows) {
    a.table.rows.push_back({row.t, row.dist_attractor, row.dist_gamma});
    horizons.push_back(row.horizon_used);
    symmetry.push_back(row.symmetry_defect);
  }
  a.meta["limit"] = {{"b", limit.b}, {"omega", limit.omega}};
  a.meta["symmetry_defect"] = symmetry;
  a.meta["gamma_horizon_used"] = table.gamma_horizon_used;
  a.meta["limit_horizon_used"] = table.limit_sample.horizon_used;
  a.meta["non_increasing"] = table.non_increasing(c.sampling.tol);
  Outcome o;
  o.provenance = base_provenance(c, c.dt);
  o.provenance["horizon_used"] = horizons;
  o.artifacts.push_back(std::move(a));
  return o;
}

inline Outcome run_verify(const Config& c) {
  const auto rep = verify::run_all({c.sampling.seed, c.sampling.jobs});
  Artifact a{"verify", {{"name", "id", "passed", "measured", "threshold"}, {}, {}}, json::object()};
  json details = json::array();
  Outcome o;
  for (const auto& r : rep.results) {
    a.table.labels.push_back(r.name);
    a.table.rows.push_back({double(r.id), r.passed ? 1.0 : 0.0, r.measured, r.threshold});
    details.push_back(r.detail);
    o.report.push_back(verify::format_line(r));
  }
  a.meta["detail"] = details;
  o.provenance = base_provenance(c, verify::kDt);
  o.artifacts.push_back(std::move(a));
  o.exit_code = rep.all_passed() ? 0 : 1;
  return o;
}

}  // namespace detail

/// Runs the scenario in memory. Profiles are validated before any integration.
inline Outcome execute(const Config& c) {
  if (c.kind != Kind::verify) validate(c.profile, c.grid, c.dt);
  switch (c.kind) {
    case Kind::equilibria: return detail::run_equilibria(c);
    case Kind::simulate: return detail::run_simulate(c);
    case Kind::extremal: return detail::run_extremal(c);
    case Kind::pullback: return detail::run_pullback(c);
    case Kind::asymptotic: return detail::run_asymptotic(c);
    case Kind::verify: return detail::run_verify(c);
  }
  throw UsageError("execute: unknown scenario kind");
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write failed for " + path.string());
}

/// Writes every artifact plus manifest.json; returns the paths in write order.
inline std::vector<std::filesystem::path> write_outputs(const Outcome& o, const Config& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) throw IoError("cannot create output directory " + c.out.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  json files = json::array();
  for (const auto& a : o.artifacts) {
    if (c.write_csv) {
      written.push_back(c.out / (a.stem + ".csv"));
      write_text(written.back(), to_csv(a.table));
      files.push_back(a.stem + ".csv");
    }
    if (c.write_json) {
      written.push_back(c.out / (a.stem + ".json"));
      write_text(written.back(), dump(to_json(a, o.provenance)));
      files.push_back(a.stem + ".json");
    }
  }
  json manifest;
  manifest["provenance"] = o.provenance;
  manifest["files"] = files;
  manifest["exit_code"] = o.exit_code;
  written.push_back(c.out / "manifest.json");
  write_text(written.back(), dump(manifest));
  return written;
}

/// Full run with exit-status mapping: 0 success, 1 failed verify criterion,
/// 2 configuration or validation error, 3 convergence failure, 4 I/O error.
inline int run_scenario(const Config& c, std::ostream& out, std::ostream& err) {
  try {
    const auto outcome = execute(c);
    const auto files = write_outputs(outcome, c);
    for (const auto& line : outcome.report) out << line << '\n';
    for (const auto& f : files) out << "wrote " << f.string() << '\n';
    return outcome.exit_code;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "invalid scenario: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace plab::scenario
