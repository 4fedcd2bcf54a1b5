#pragma once

// Command-line front end: `entropy`, `mi` and `credible` subcommands. The
// whole command runs in-process through run_cli() so it can be tested
// without spawning the binary; tools/idm_cli.cpp only forwards argv.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "idm/idm.hpp"
#include "idm/report.hpp"

namespace idm::cli {

using report::Json;

struct CliResult {
  int exit_code = 0;
  std::string out;  // JSON document
  std::string err;  // human-readable summary, warnings
};

/// Input problems (unreadable file, malformed numbers, ragged rows).
class InputError : public Error {
public:
  using Error::Error;
};

struct Environment {
  std::optional<std::string> idm_seed;  // value of IDM_SEED, if set

  static Environment from_process() {
    Environment env;
    if (const char* v = std::getenv("IDM_SEED")) env.idm_seed = v;
    return env;
  }
};

// --- input ----------------------------------------------------------------

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::int64_t parse_integer(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw InputError("malformed input: empty count");
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw InputError("malformed input: '" + t + "' is not an integer");
  }
  if (used != t.size()) throw InputError("malformed input: '" + t + "' is not an integer");
  if (v < 0) throw InputError("negative count: " + t);
  return v;
}

inline std::vector<std::int64_t> parse_count_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(parse_integer(token));
  if (out.empty()) throw InputError("malformed input: no counts given");
  return out;
}

using Table = std::vector<std::vector<std::int64_t>>;

inline std::vector<std::int64_t> json_count_row(const Json& row) {
  if (!row.is_array()) throw InputError("malformed input: table rows must be arrays");
  std::vector<std::int64_t> out;
  for (const auto& x : row) {
    if (x.is_number_integer() || x.is_number_unsigned()) {
      const auto v = x.get<std::int64_t>();
      if (v < 0) throw InputError("negative count: " + std::to_string(v));
      out.push_back(v);
    } else {
      throw InputError("malformed input: counts must be integers");
    }
  }
  return out;
}

inline Table json_table(const Json& j) {
  if (!j.is_array()) throw InputError("malformed input: table must be an array of rows");
  Table t;
  for (const auto& row : j) t.push_back(json_count_row(row));
  if (t.empty() || t.front().empty()) throw InputError("empty table");
  for (const auto& row : t)
    if (row.size() != t.front().size()) throw InputError("ragged table: rows differ in length");
  return t;
}

inline Table parse_table_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed table JSON: ") + e.what());
  }
  return json_table(j);
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    t.push_back(parse_count_list(line));
  }
  if (t.empty()) throw InputError("empty table");
  for (const auto& row : t)
    if (row.size() != t.front().size()) throw InputError("ragged table: rows differ in length");
  return t;
}

/// What an input file or inline flag provided.
struct DataInput {
  std::optional<std::vector<std::int64_t>> counts;
  std::optional<Table> table;
  std::optional<double> s;
};

inline DataInput read_input_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read input file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  DataInput d;
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (!is_json) {
    d.table = parse_csv(text);
    return d;
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed input file: ") + e.what());
  }
  if (!j.is_object()) throw InputError("malformed input file: expected an object");
  if (j.contains("counts")) d.counts = json_count_row(j["counts"]);
  if (j.contains("table")) d.table = json_table(j["table"]);
  if (!d.counts && !d.table) throw InputError("malformed input file: needs \"counts\" or \"table\"");
  if (j.contains("s")) {
    if (!j["s"].is_number()) throw InputError("malformed input file: \"s\" must be a number");
    d.s = j["s"].get<double>();
  }
  return d;
}

// --- options ----------------------------------------------------------------

struct CommonOptions {
  std::string counts;
  std::string table;
  std::string input;
  std::optional<double> s;
  std::string oracle;
  std::optional<std::uint64_t> seed;
  std::uint64_t max_grid_points = 20'000'000;
  bool quiet = false;
  bool timing = false;
};

struct OracleRequest {
  enum class Type { none, grid, mc } type = Type::none;
  double step = 0.0;
  std::uint64_t samples = 0;
};

inline OracleRequest parse_oracle(const std::string& text) {
  OracleRequest r;
  if (text.empty() || text == "off") return r;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "grid") {
      r.type = OracleRequest::Type::grid;
      r.step = std::stod(arg);
      return r;
    }
    if (kind == "mc") {
      r.type = OracleRequest::Type::mc;
      r.samples = std::stoull(arg);
      return r;
    }
  } catch (const std::exception&) {
  }
  throw InputError("malformed --oracle value '" + text + "' (expected grid:STEP or mc:N)");
}

inline std::uint64_t parse_seed_text(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(trim(text), &used);
    if (used == trim(text).size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("malformed IDM_SEED value '" + text + "'");
}

struct Resolved {
  std::optional<std::vector<std::int64_t>> counts;
  std::optional<Table> table;
  double s = 1.0;
};

inline Resolved resolve_input(const CommonOptions& o) {
  Resolved r;
  DataInput file;
  if (!o.input.empty()) file = read_input_file(o.input);
  if (!o.counts.empty()) r.counts = parse_count_list(o.counts);
  else if (file.counts) r.counts = file.counts;
  if (!o.table.empty()) r.table = parse_table_text(o.table);
  else if (file.table) r.table = file.table;
  r.s = o.s ? *o.s : (file.s ? *file.s : 1.0);
  if (!(r.s > 0.0) || !std::isfinite(r.s)) throw Error("s must be positive");
  return r;
}

inline std::uint64_t require_seed(const CommonOptions& o, const Environment& env) {
  if (o.seed) return *o.seed;
  if (env.idm_seed) return parse_seed_text(*env.idm_seed);
  throw Error("a seed is required for Monte Carlo computations (--seed or IDM_SEED)");
}

inline std::optional<std::uint64_t> optional_seed(const CommonOptions& o, const Environment& env) {
  if (o.seed) return o.seed;
  if (env.idm_seed) return parse_seed_text(*env.idm_seed);
  return std::nullopt;
}

// --- report pieces -----------------------------------------------------------

inline Json to_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline Json to_json(std::span<const std::int64_t> v) {
  Json a = Json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

inline Json table_json(const Table& t) {
  Json a = Json::array();
  for (const auto& row : t) a.push_back(to_json(std::span<const std::int64_t>(row)));
  return a;
}

inline Json base_report(const std::string& command, const std::string& method) {
  Json j;
  j["command"] = command;
  j["input"] = Json::object();
  j["method"] = method;
  j["intervals"] = Json::array();
  j["witnesses"] = Json::object();
  j["diagnostics"] = Json::object();
  j["notes"] = Json::array();
  return j;
}

inline void note_s_range(Json& report, const IdmConfig& cfg, std::string& err) {
  if (!cfg.in_recommended_range()) {
    const std::string msg = "s outside the recommended range [1,2]";
    report["notes"].push_back(msg);
    err += "warning: " + msg + "\n";
  }
}

inline Counts counts_for_flat_command(const Resolved& r, const std::string& command) {
  if (r.counts) return Counts(*r.counts);
  if (r.table) {
    if (r.table->size() == 1) return Counts(r.table->front());
    throw InputError(command + ": expected a single row of counts, got a table");
  }
  throw InputError(command + ": no counts given (--counts, --input)");
}

inline std::string format_interval(const Interval& iv) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.6f, %.6f]", iv.lower, iv.upper);
  return buf;
}

// --- entropy -------------------------------------------------------------------

inline Json cmd_entropy(const CommonOptions& o, const Environment& env, std::string& err) {
  const Resolved in = resolve_input(o);
  const Counts counts = counts_for_flat_command(in, "entropy");
  const IdmConfig cfg(in.s);
  const OracleRequest oracle = parse_oracle(o.oracle);

  Json rep = base_report("entropy", "exact_and_sandwich");
  rep["input"]["counts"] = to_json(counts.values());
  rep["input"]["s"] = cfg.s;
  note_s_range(rep, cfg, err);

  const Interval exact = entropy_interval_exact(counts, cfg);
  const Sandwich sw = sandwich(entropy_residues(counts, cfg), expected_entropy, counts, cfg);
  rep["intervals"].push_back(report::interval_json("exact", exact));
  rep["intervals"].push_back(report::interval_json("conservative_outer", sw.outer));
  rep["intervals"].push_back(report::interval_json("inner_witness", sw.inner()));

  Json diag;
  diag["n"] = counts.total();
  diag["d"] = counts.size();
  diag["n_plus_s"] = static_cast<double>(counts.total()) + cfg.s;
  diag["sigma"] = sigma(counts, cfg);
  diag["oracle"] = nullptr;
  diag["seed"] = nullptr;

  if (oracle.type == OracleRequest::Type::grid) {
    const Interval g = grid_extrema(expected_entropy, counts, cfg, GridSpec{oracle.step, o.max_grid_points});
    rep["intervals"].push_back(report::interval_json("grid_oracle", g));
    diag["oracle"] = Json{{"type", "grid"}, {"step", oracle.step}};
  } else if (oracle.type == OracleRequest::Type::mc) {
    const std::uint64_t seed = require_seed(o, env);
    const auto t_set = default_t_set(counts.size());
    double lo = INFINITY, hi = -INFINITY, worst_se = 0.0;
    for (std::size_t k = 0; k < t_set.size(); ++k) {
      const auto r = mc_functional(plugin_entropy, counts, cfg, t_set[k],
                                   McSpec(oracle.samples, derive_seed(seed, k)));
      lo = std::min(lo, r.mean);
      hi = std::max(hi, r.mean);
      worst_se = std::max(worst_se, r.std_error);
    }
    rep["intervals"].push_back(report::interval_json("mc_oracle", Interval(lo, hi, IntervalKind::oracle)));
    diag["oracle"] = Json{{"type", "mc"}, {"samples", oracle.samples}, {"t_set", "vertices_and_center"},
                          {"max_std_error", worst_se}, {"seed_derivation", "splitmix64(seed, t_index)"}};
    diag["seed"] = seed;
  }

  const auto lo_vertex = exact_min_vertex(counts, cfg);
  const auto hi_point = exact_max_point(counts, cfg);
  Json w;
  w["exact_min_vertex"] = lo_vertex.index + 1;
  w["u_min"] = to_json(lo_vertex.u.values);
  w["u_max"] = to_json(hi_point.u_max.values);
  w["m_star"] = hi_point.m_star;
  w["u_tilde"] = hi_point.u_tilde;
  w["inner_high_vertex"] = sw.witness_hi + 1;
  w["inner_low_vertex"] = sw.witness_lo + 1;
  w["inner_high"] = sw.inner_high;
  w["inner_low"] = sw.inner_low;
  rep["witnesses"] = w;
  rep["diagnostics"] = diag;

  if (!o.quiet) {
    err += "expected entropy (nats), n=" + std::to_string(counts.total()) + " d=" + std::to_string(counts.size()) + "\n";
    err += "  exact              " + format_interval(exact) + "\n";
    err += "  conservative outer " + format_interval(sw.outer) + "\n";
    err += "  inner witnesses    " + format_interval(sw.inner()) + "\n";
  }
  return rep;
}

// --- mi ------------------------------------------------------------------------

inline Interval scaled(const Interval& iv, double k) {
  return Interval(iv.lower * k, iv.upper * k, iv.kind);
}

inline JointCounts table_for_mi(const Resolved& in) {
  if (in.table) return JointCounts(*in.table);
  if (in.counts) return JointCounts(Table{*in.counts});
  throw InputError("mi: no table given (--table, --input)");
}

inline Json cmd_mi(const CommonOptions& o, bool bits, const Environment& env, std::string& err) {
  const Resolved in = resolve_input(o);
  const JointCounts jc = table_for_mi(in);
  const IdmConfig cfg(in.s);
  const OracleRequest oracle = parse_oracle(o.oracle);
  const double unit = bits ? 1.0 / std::log(2.0) : 1.0;
  const TableDims dims = jc.dims();

  Json rep = base_report("mi", "crude_and_sandwich");
  Table t(dims.rows, std::vector<std::int64_t>(dims.cols));
  for (std::size_t i = 0; i < dims.rows; ++i)
    for (std::size_t j = 0; j < dims.cols; ++j) t[i][j] = jc.at(i, j);
  rep["input"]["table"] = table_json(t);
  rep["input"]["s"] = cfg.s;
  note_s_range(rep, cfg, err);

  const Interval crude = mi_crude_interval(jc, cfg);
  const Sandwich sw = mi_sandwich(jc, cfg);
  rep["intervals"].push_back(report::interval_json("crude", scaled(crude, unit)));
  rep["intervals"].push_back(report::interval_json("conservative_outer", scaled(sw.outer, unit)));
  rep["intervals"].push_back(report::interval_json("inner_witness", scaled(sw.inner(), unit)));

  Json diag;
  diag["units"] = bits ? "bits" : "nats";
  diag["n"] = jc.total();
  diag["rows"] = dims.rows;
  diag["cols"] = dims.cols;
  diag["n_plus_s"] = static_cast<double>(jc.total()) + cfg.s;
  diag["sigma"] = sigma(jc.flat(), cfg);
  diag["crude_contains_outer"] = crude.contains(sw.outer, 1e-12);
  diag["oracle"] = nullptr;
  diag["seed"] = nullptr;

  if (oracle.type == OracleRequest::Type::grid) {
    const GridSpec grid{oracle.step, o.max_grid_points};
    const Interval full = mi_full_oracle_interval(jc, cfg, grid);
    const Interval tensor = tensor_oracle_interval(jc, cfg, oracle.step, o.max_grid_points);
    rep["intervals"].push_back(report::interval_json("full_grid_oracle", scaled(full, unit)));
    rep["intervals"].push_back(report::interval_json("tensor_grid_oracle", scaled(tensor, unit)));
    // tensor grid points are not on the full grid; allow one grid step of slack
    diag["oracle"] = Json{{"type", "grid"},
                          {"step", oracle.step},
                          {"containment_slack", oracle.step},
                          {"tensor_within_full", full.contains(tensor, oracle.step)},
                          {"full_within_outer", sw.outer.contains(full, 1e-12)},
                          {"full_within_crude", crude.contains(full, 1e-12)}};
  } else if (oracle.type == OracleRequest::Type::mc) {
    const std::uint64_t seed = require_seed(o, env);
    const TVector center = TVector::center(dims.cells());
    const auto r = mc_functional(mi_statistic(dims), jc.flat(), cfg, center, McSpec(oracle.samples, seed));
    const double at_center = expected_mi(u_from_t(jc.flat(), cfg, center), dims);
    diag["oracle"] = Json{{"type", "mc"},
                          {"samples", oracle.samples},
                          {"t", "center"},
                          {"mc_mean", r.mean * unit},
                          {"mc_std_error", r.std_error * unit},
                          {"closed_form_at_t", at_center * unit},
                          {"outer_contains_mc_mean", sw.outer.contains(r.mean, 3.0 * r.std_error)}};
    diag["seed"] = seed;
  }

  Json w;
  auto cell_json = [&](std::size_t flat) {
    const TensorT f = tensor_vertex_check(jc, flat);
    return Json{{"row", flat / dims.cols + 1},
                {"col", flat % dims.cols + 1},
                {"row_t", to_json(f.row_t.values())},
                {"col_t", to_json(f.col_t.values())}};
  };
  w["inner_high_cell"] = cell_json(sw.witness_hi);
  w["inner_low_cell"] = cell_json(sw.witness_lo);
  w["inner_high"] = sw.inner_high * unit;
  w["inner_low"] = sw.inner_low * unit;
  rep["witnesses"] = w;
  rep["diagnostics"] = diag;

  if (!o.quiet) {
    err += std::string("expected mutual information (") + (bits ? "bits" : "nats") + "), " +
           std::to_string(dims.rows) + "x" + std::to_string(dims.cols) + " table, n=" + std::to_string(jc.total()) + "\n";
    err += "  crude              " + format_interval(scaled(crude, unit)) + "\n";
    err += "  conservative outer " + format_interval(scaled(sw.outer, unit)) + "\n";
    err += "  inner witnesses    " + format_interval(scaled(sw.inner(), unit)) + "\n";
  }
  return rep;
}

// --- credible ------------------------------------------------------------------

struct CredibleOptions {
  double alpha = 0.95;
  std::string stat = "entropy";
  std::uint64_t samples = 100'000;
  std::string mode = "two_sided";
  std::optional<double> t_grid;
};

inline CredibleMode parse_mode(const std::string& m) {
  if (m == "two_sided") return CredibleMode::two_sided_shortest;
  if (m == "lower") return CredibleMode::one_sided_lower;
  if (m == "upper") return CredibleMode::one_sided_upper;
  throw InputError("unknown --mode '" + m + "' (expected two_sided, lower or upper)");
}

/// All grid points of the simplex with the given step.
inline std::vector<TVector> grid_t_set(std::size_t d, double step, std::uint64_t max_points) {
  const GridSpec grid{step, max_points};
  const std::uint64_t k = grid.divisions();
  require(simplex_grid_size(k, d) <= max_points, "t grid too large");
  std::vector<TVector> set;
  const double kd = static_cast<double>(k);
  for_each_composition(k, d, [&](std::span<const std::uint64_t> p) {
    std::vector<double> t(d);
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) head += (t[i] = static_cast<double>(p[i]) / kd);
    t[d - 1] = 1.0 - head;
    set.emplace_back(std::move(t));
  });
  return set;
}

inline Json cmd_credible(const CommonOptions& o, const CredibleOptions& c, const Environment& env, std::string& err) {
  const Resolved in = resolve_input(o);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error("alpha must lie in (0,1)");
  const IdmConfig cfg(in.s);
  const CredibleSpec spec(c.alpha, parse_mode(c.mode));
  const std::uint64_t seed = require_seed(o, env);

  // the statistic, the counts it is sampled over, and a robust interval for its mean
  Counts counts;
  ChanceStatistic stat;
  Interval robust_mean;
  std::string mean_source;
  Json input;
  if (c.stat == "mi") {
    const JointCounts jc = table_for_mi(in);
    counts = jc.flat();
    stat = mi_statistic(jc.dims());
    robust_mean = mi_sandwich(jc, cfg).outer;
    mean_source = "mi_sandwich_outer";
    Table t(jc.dims().rows, std::vector<std::int64_t>(jc.dims().cols));
    for (std::size_t i = 0; i < jc.dims().rows; ++i)
      for (std::size_t j = 0; j < jc.dims().cols; ++j) t[i][j] = jc.at(i, j);
    input["table"] = table_json(t);
  } else {
    if (in.table && !in.counts) {
      counts = JointCounts(*in.table).flat();
      input["table"] = table_json(*in.table);
    } else {
      counts = counts_for_flat_command(in, "credible");
      input["counts"] = to_json(counts.values());
    }
    if (c.stat == "entropy") {
      stat = plugin_entropy;
      robust_mean = entropy_interval_exact(counts, cfg);
      mean_source = "entropy_exact";
    } else if (c.stat.rfind("component:", 0) == 0) {
      const std::int64_t i = parse_integer(c.stat.substr(10));
      if (i < 1 || static_cast<std::size_t>(i) > counts.size())
        throw InputError("component index out of range: " + c.stat);
      const auto idx = static_cast<std::size_t>(i - 1);
      stat = component_statistic(idx);
      // the mean of pi_i is u_i, which ranges exactly over [u0_i, u0_i + sigma]
      const UPoint u0 = u_zero(counts, cfg);
      robust_mean = Interval(u0[idx], std::min(1.0, u0[idx] + u0.sigma), IntervalKind::exact);
      mean_source = "component_exact";
    } else {
      throw InputError("unknown --stat '" + c.stat + "' (expected entropy, mi or component:i)");
    }
  }
  input["s"] = cfg.s;

  Json rep = base_report("credible", "union_and_kappa_sigma");
  rep["input"] = input;
  rep["input"]["alpha"] = c.alpha;
  rep["input"]["stat"] = c.stat;
  rep["input"]["mode"] = c.mode;
  note_s_range(rep, cfg, err);

  const std::vector<TVector> t_set =
      c.t_grid ? grid_t_set(counts.size(), *c.t_grid, o.max_grid_points) : default_t_set(counts.size());
  const McSpec mc(c.samples, seed);
  const RobustCredibleResult uni = robust_credible_union(stat, counts, cfg, spec, mc, t_set);

  const TVector center = TVector::center(counts.size());
  const std::uint64_t sigma_stream = t_set.size();
  const McResult at_center = mc_functional(stat, counts, cfg, center, McSpec(c.samples, derive_seed(seed, sigma_stream)));
  const RobustCredibleResult ks = mean_plus_kappa_sigma(robust_mean, at_center.stddev, c.alpha);

  rep["intervals"].push_back(report::interval_json("robust_mean", robust_mean));
  rep["intervals"].push_back(report::interval_json("union_of_vertices", uni.interval));
  rep["intervals"].push_back(report::interval_json("mean_plus_kappa_sigma", ks.interval));
  rep["notes"].push_back(
      "mean_plus_kappa_sigma assumes a Gaussian posterior with spread independent of t; it could be a "
      "non-conservative approximation");

  // coverage audit on fresh samples
  const double tol = 3.0 * std::sqrt(c.alpha * (1.0 - c.alpha) / static_cast<double>(c.samples));
  Json audit = Json::array();
  bool all_pass = true;
  Json details = Json::array();
  for (std::size_t k = 0; k < t_set.size(); ++k) {
    const auto& d = uni.per_vertex_details[k];
    details.push_back(Json{{"t", to_json(t_set[k].values())},
                           {"mean", d.mean},
                           {"stddev", d.stddev},
                           {"lower", d.lower},
                           {"upper", d.upper},
                           {"half_width_lower", d.half_width_lower},
                           {"half_width_upper", d.half_width_upper}});
    const McResult fresh = mc_functional(stat, counts, cfg, t_set[k],
                                         McSpec(c.samples, derive_seed(seed ^ 0xA5A5A5A5A5A5A5A5ULL, k)));
    const double cov_union = empirical_coverage(fresh.sorted_samples, uni.interval.lower, uni.interval.upper);
    const double cov_ks = empirical_coverage(fresh.sorted_samples, ks.interval.lower, ks.interval.upper);
    const bool pass = cov_union >= c.alpha - tol;
    all_pass = all_pass && pass;
    audit.push_back(Json{{"t_index", k + 1},
                         {"union_coverage", cov_union},
                         {"kappa_sigma_coverage", cov_ks},
                         {"union_pass", pass}});
  }

  Json w;
  w["per_t"] = details;
  rep["witnesses"] = w;

  Json diag;
  diag["n"] = counts.total();
  diag["d"] = counts.size();
  diag["sigma"] = sigma(counts, cfg);
  diag["kappa"] = ks.kappa;
  diag["sigma_star"] = at_center.stddev;
  diag["sigma_star_t"] = "center";
  diag["robust_mean_source"] = mean_source;
  diag["samples"] = c.samples;
  diag["seed"] = seed;
  diag["seed_derivation"] = "splitmix64(seed, t_index); audit uses seed xor 0xA5A5A5A5A5A5A5A5";
  diag["t_set"] = c.t_grid ? "grid" : "vertices_and_center";
  diag["coverage_tolerance"] = tol;
  diag["coverage_audit"] = audit;
  diag["coverage_audit_pass"] = all_pass;
  rep["diagnostics"] = diag;

  if (!o.quiet) {
    char kb[32];
    std::snprintf(kb, sizeof kb, "%.3f", ks.kappa);
    err += "robust credible intervals, stat=" + c.stat + ", alpha=" + std::to_string(c.alpha) + ", kappa=" + kb + "\n";
    err += "  robust mean            " + format_interval(robust_mean) + "\n";
    err += "  union of vertices      " + format_interval(uni.interval) + "\n";
    err += "  mean + kappa sigma     " + format_interval(ks.interval) + " (may be non-conservative)\n";
    err += std::string("  coverage audit         ") + (all_pass ? "pass" : "FAIL") + "\n";
  }
  return rep;
}

// --- dispatch ------------------------------------------------------------------

inline Json error_json(const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = Json{{"kind", kind}, {"message", message}};
  return j;
}

inline void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--counts", o.counts, "comma-separated counts, e.g. 3,6");
  sub->add_option("--table", o.table, "contingency table as JSON, e.g. [[2,1],[1,2]]");
  sub->add_option("--input", o.input, "CSV (rows of integers) or JSON ({\"counts\":[..]} or {\"table\":[[..]]}, optional \"s\")");
  sub->add_option("--s", o.s, "IDM hyperparameter s > 0 (default 1)");
  sub->add_option("--seed", o.seed, "seed for Monte Carlo work (falls back to IDM_SEED)");
  sub->add_option("--max-grid-points", o.max_grid_points, "refuse grids larger than this");
  sub->add_flag("--quiet", o.quiet, "suppress the summary on stderr");
  sub->add_flag("--timing", o.timing, "add wall_time_seconds to the report (breaks byte-identical reruns)");
}

/// Runs one command line (argv without the program name).
inline CliResult run_cli(const std::vector<std::string>& args, const Environment& env = Environment::from_process()) {
  CliResult result;
  CLI::App app{"Robust interval estimates under the Imprecise Dirichlet Model", "idm"};
  app.require_subcommand(1);

  CommonOptions entropy_o, mi_o, cred_o;
  bool bits = false;
  CredibleOptions cred;

  auto* entropy = app.add_subcommand("entropy", "expected entropy: exact, conservative and inner intervals");
  add_common(entropy, entropy_o);
  entropy->add_option("--oracle", entropy_o.oracle, "grid:STEP or mc:N");

  auto* mi = app.add_subcommand("mi", "expected mutual information of a contingency table");
  add_common(mi, mi_o);
  mi->add_option("--oracle", mi_o.oracle, "grid:STEP or mc:N");
  mi->add_flag("--bits", bits, "report in bits instead of nats");

  auto* credible = app.add_subcommand("credible", "robust credible intervals by Monte Carlo");
  add_common(credible, cred_o);
  credible->add_option("--alpha", cred.alpha, "credible level in (0,1) (default 0.95)");
  credible->add_option("--stat", cred.stat, "entropy | mi | component:i (1-based)");
  credible->add_option("--samples", cred.samples, "Monte Carlo samples per prior (default 100000)");
  credible->add_option("--mode", cred.mode, "two_sided | lower | upper");
  credible->add_option("--t-grid", cred.t_grid, "use every simplex grid point of this step as the prior set");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.err = app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.err = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = 2;
    result.out = report::dump_canonical(error_json("usage", e.what()));
    result.err = std::string("error: ") + e.what() + "\n";
    return result;
  }

  const auto start = std::chrono::steady_clock::now();
  const CommonOptions* used = nullptr;
  try {
    Json rep;
    if (entropy->parsed()) {
      used = &entropy_o;
      rep = cmd_entropy(entropy_o, env, result.err);
    } else if (mi->parsed()) {
      used = &mi_o;
      rep = cmd_mi(mi_o, bits, env, result.err);
    } else {
      used = &cred_o;
      rep = cmd_credible(cred_o, cred, env, result.err);
    }
    if (used->timing)
      rep["diagnostics"]["wall_time_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.out = report::dump_canonical(rep);
  } catch (const InputError& e) {
    result.exit_code = 1;
    result.out = report::dump_canonical(error_json("invalid_input", e.what()));
    result.err = std::string("error: ") + e.what() + "\n";
  } catch (const Error& e) {
    result.exit_code = 1;
    result.out = report::dump_canonical(error_json("invalid_argument", e.what()));
    result.err = std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace idm::cli
