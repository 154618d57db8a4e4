#pragma once

// Command-line workflows. A run is described by one JSON object (file keys, with
// command-line flags merged on top); run() validates it, solves, and writes JSON/CSV.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "psse/io.hpp"
#include "psse/psse.hpp"

namespace psse::cli {

using nlohmann::json;

/// Validation failure; `code` is one of the CONFIG_* identifiers.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class Mode { Solve, Scan, Series, ApproxReport };

struct Sample {
  double x_min;
  double x_max;
  std::size_t count;
};

struct RunConfig {
  Mode mode = Mode::Solve;
  std::string potential = "harmonic";
  StandardParams params;  // mass/hbar/tol live here too
  std::vector<PotentialRegion> regions;  // potential == "piecewise"
  std::size_t n_max = 4000;
  std::optional<std::pair<double, double>> energy_range;
  std::optional<ParityMode> parity;  // unset: both if symmetric, else none
  Seeds seeds{1.0, 0.0};
  double energy = 0.0;
  std::size_t n = 20;      // series degree / largest degree in approx-report
  std::size_t n_min = 4;   // approx-report
  std::size_t degree = 200;
  double endpoint = 0.0;
  std::size_t grid = 128;
  std::optional<Sample> sample;
  std::string output;
  bool allow_extrapolation = false;
  unsigned threads = 0;  // 0: all hardware threads, capped by PSSE_THREADS
};

namespace detail {

inline Mode parse_mode(const std::string& s) {
  if (s == "solve") return Mode::Solve;
  if (s == "scan") return Mode::Scan;
  if (s == "series") return Mode::Series;
  if (s == "approx-report") return Mode::ApproxReport;
  throw ConfigError("CONFIG_MODE", "unknown mode '" + s + "' (solve, scan, series, approx-report)");
}

inline ParityMode parse_parity(const std::string& s) {
  if (s == "even") return ParityMode::Even;
  if (s == "odd") return ParityMode::Odd;
  if (s == "both") return ParityMode::Both;
  if (s == "none") return ParityMode::None;
  throw ConfigError("CONFIG_PARITY", "unknown parity '" + s + "' (even, odd, both, none)");
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("CONFIG_TYPE", std::string("bad value for '") + key + "'");
  }
}

inline double get_real(const json& j, const char* key) {
  const double v = get<double>(j, key);
  if (!std::isfinite(v)) throw ConfigError("CONFIG_TYPE", std::string("'") + key + "' must be finite");
  return v;
}

inline std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("CONFIG_TYPE", std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline std::vector<double> get_reals(const json& j, const char* key, std::size_t size = 0) {
  const auto v = get<std::vector<double>>(j, key);
  if (size != 0 && v.size() != size) {
    throw ConfigError("CONFIG_TYPE", std::string("'") + key + "' needs " + std::to_string(size) + " values");
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw ConfigError("CONFIG_TYPE", std::string("'") + key + "' must be finite");
  }
  return v;
}

inline StandardPotential standard_kind(const std::string& name) {
  if (name == "infinite_well") return StandardPotential::InfiniteWell;
  if (name == "finite_well") return StandardPotential::FiniteWell;
  if (name == "linear") return StandardPotential::Linear;
  if (name == "harmonic") return StandardPotential::Harmonic;
  if (name == "polynomial") return StandardPotential::Polynomial;
  throw ConfigError("CONFIG_POTENTIAL", "unknown potential '" + name + "'");
}

}  // namespace detail

inline PotentialSpec build_potential(const RunConfig& c) {
  if (c.potential == "piecewise") return PotentialSpec::piecewise(c.regions);
  return build_standard(detail::standard_kind(c.potential), c.params);
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "mode",   "potential", "mass",     "hbar",   "tol",      "n_max",    "energy_range",
      "parity", "seeds",     "energy",   "n",      "n_min",    "degree",   "endpoint",
      "grid",   "sample",    "output",   "omega",  "efield",   "width",    "depth",
      "extent", "coefficients", "regions", "allow_extrapolation", "threads"};
  return keys;
}

/// Builds and validates a RunConfig from the merged JSON object.
inline RunConfig config_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("CONFIG_PARSE", "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw ConfigError("CONFIG_KEY", "unknown key '" + key + "'");
    }
  }
  RunConfig c;
  if (j.contains("mode")) c.mode = parse_mode(get<std::string>(j, "mode"));
  if (j.contains("potential")) c.potential = get<std::string>(j, "potential");
  auto& p = c.params;
  if (j.contains("mass")) p.mass = get_real(j, "mass");
  if (j.contains("hbar")) p.hbar = get_real(j, "hbar");
  if (!(p.mass > 0.0) || !(p.hbar > 0.0)) throw ConfigError("CONFIG_RANGE", "mass and hbar must be positive");
  if (j.contains("tol")) p.tol = get_real(j, "tol");
  if (!(p.tol >= 1e-14) || !(p.tol < 1.0)) throw ConfigError("CONFIG_RANGE", "tol must lie in [1e-14, 1)");
  if (j.contains("omega")) p.omega = get_real(j, "omega");
  if (j.contains("efield")) p.efield = get_real(j, "efield");
  if (j.contains("width")) p.a = get_real(j, "width");
  if (j.contains("depth")) p.depth = get_real(j, "depth");
  if (j.contains("extent")) p.extent = get_real(j, "extent");
  if (j.contains("coefficients")) p.coefficients = get_reals(j, "coefficients");
  if (j.contains("n_max")) c.n_max = get_count(j, "n_max");
  if (j.contains("energy_range")) {
    const auto r = get_reals(j, "energy_range", 2);
    if (!(r[0] < r[1])) throw ConfigError("CONFIG_RANGE", "energy_range needs e_min < e_max");
    c.energy_range = {r[0], r[1]};
  }
  if (j.contains("parity")) c.parity = parse_parity(get<std::string>(j, "parity"));
  if (j.contains("seeds")) {
    const auto s = get_reals(j, "seeds", 2);
    c.seeds = {s[0], s[1]};
  }
  if (j.contains("energy")) c.energy = get_real(j, "energy");
  if (j.contains("n")) c.n = get_count(j, "n");
  if (j.contains("n_min")) c.n_min = get_count(j, "n_min");
  if (j.contains("degree")) c.degree = get_count(j, "degree");
  if (j.contains("endpoint")) c.endpoint = get_real(j, "endpoint");
  if (j.contains("grid")) c.grid = get_count(j, "grid");
  if (j.contains("sample")) {
    const auto s = get_reals(j, "sample", 3);
    if (!(s[0] < s[1]) || !(s[2] >= 2.0) || s[2] != std::floor(s[2])) {
      throw ConfigError("CONFIG_RANGE", "sample needs MIN < MAX and an integer COUNT >= 2");
    }
    c.sample = Sample{s[0], s[1], static_cast<std::size_t>(s[2])};
  }
  if (j.contains("output")) c.output = get<std::string>(j, "output");
  if (j.contains("allow_extrapolation")) c.allow_extrapolation = get<bool>(j, "allow_extrapolation");
  if (j.contains("threads")) c.threads = static_cast<unsigned>(get_count(j, "threads"));
  if (j.contains("regions")) {
    const auto& rs = j.at("regions");
    if (!rs.is_array() || rs.empty()) throw ConfigError("CONFIG_TYPE", "'regions' must be a non-empty array");
    for (const auto& r : rs) {
      if (!r.is_object() || !r.contains("interval") || !r.contains("coefficients")) {
        throw ConfigError("CONFIG_TYPE", "each region needs 'interval' and 'coefficients'");
      }
      const auto iv = get_reals(r, "interval", 2);
      if (!(iv[0] < iv[1])) throw ConfigError("CONFIG_RANGE", "region interval needs a < b");
      c.regions.push_back({Interval(iv[0], iv[1]), PowerSeries(get_reals(r, "coefficients"))});
    }
  }

  if (c.potential != "piecewise") (void)standard_kind(c.potential);
  if (c.potential == "piecewise" && c.regions.empty()) {
    throw ConfigError("CONFIG_POTENTIAL", "piecewise potential needs 'regions'");
  }
  if (c.potential == "polynomial" && p.coefficients.empty()) {
    throw ConfigError("CONFIG_POTENTIAL", "polynomial potential needs 'coefficients'");
  }
  if (c.n_max < 2) throw ConfigError("CONFIG_RANGE", "n_max must be at least 2");
  if (c.mode == Mode::Solve || c.mode == Mode::Scan) {
    if (!c.energy_range) throw ConfigError("CONFIG_MISSING", "this mode needs energy_range");
    if (c.grid < 8) throw ConfigError("CONFIG_RANGE", "grid needs at least 8 points");
    if (c.degree < 2 || c.degree > c.n_max) throw ConfigError("CONFIG_RANGE", "degree must lie in [2, n_max]");
    if (c.endpoint < 0.0) throw ConfigError("CONFIG_RANGE", "endpoint must be non-negative");
  }
  if (c.mode == Mode::Series && (c.n < 2 || c.n > c.n_max)) {
    throw ConfigError("CONFIG_RANGE", "n must lie in [2, n_max]");
  }
  if (c.mode == Mode::ApproxReport && (c.n_min < 2 || c.n_min > c.n || c.n > c.n_max)) {
    throw ConfigError("CONFIG_RANGE", "approx-report needs 2 <= n_min <= n <= n_max");
  }
  if (c.sample && c.output.empty()) {
    throw ConfigError("CONFIG_OUTPUT", "sampling writes CSV files and needs an output path");
  }
  try {
    (void)build_potential(c);
  } catch (const Error& e) {
    throw ConfigError("CONFIG_POTENTIAL", e.what());
  }
  return c;
}

/// Deterministic JSON text: keys sorted (std::map order), floats as %.17g, two-space indent.
inline void write_json(std::ostream& os, const json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << inner << json(k).dump() << ": ";
        write_json(os, v, indent + 2);
      }
      os << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
      // keep integral-valued reals typed as reals
      if (std::string_view(buf).find_first_of(".en") == std::string_view::npos) os << ".0";
      return;
    }
    default:
      os << j.dump();
  }
}

inline std::string to_json_text(const json& j) {
  std::ostringstream os;
  write_json(os, j);
  os << "\n";
  return os.str();
}

inline unsigned thread_cap(unsigned requested) {
  unsigned t = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PSSE_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) t = std::min<unsigned>(t, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      throw ConfigError("CONFIG_ENV", "PSSE_THREADS must be a positive integer");
    }
  }
  return t;
}

inline ScanConfig scan_config(const RunConfig& c, const PotentialSpec& v) {
  ScanConfig s;
  s.e_min = c.energy_range->first;
  s.e_max = c.energy_range->second;
  s.grid_points = c.grid;
  s.degree = c.degree;
  s.endpoint = c.endpoint;
  s.tol = c.params.tol;
  s.n_max = c.n_max;
  s.threads = thread_cap(c.threads);
  s.parity = c.parity.value_or(v.is_symmetric() ? ParityMode::Both : ParityMode::None);
  return s;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("CONFIG_OUTPUT", "cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw ConfigError("CONFIG_OUTPUT", "write to '" + path.string() + "' failed");
}

inline std::string real_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Sibling path "<stem>_<suffix>.csv" of the JSON output.
inline std::filesystem::path csv_path(const std::string& output, const std::string& suffix) {
  std::filesystem::path p(output);
  return p.parent_path() / (p.stem().string() + "_" + suffix + ".csv");
}

}  // namespace detail

/// CSV samples of a state; points outside its interval are dropped unless extrapolation
/// is allowed, in which case they are kept and flagged in a fourth column.
inline std::string sample_csv(const Eigenstate& st, const Sample& s, bool allow_extrapolation) {
  std::ostringstream os;
  os << (allow_extrapolation ? "x,psi,density,extrapolated\n" : "x,psi,density\n");
  for (std::size_t i = 0; i < s.count; ++i) {
    const double x = s.x_min + (s.x_max - s.x_min) * static_cast<double>(i) / static_cast<double>(s.count - 1);
    const bool inside = st.interval.contains(x);
    if (!inside && !allow_extrapolation) continue;
    const double psi = st.regions(x);
    os << detail::real_text(x) << ',' << detail::real_text(psi) << ',' << detail::real_text(psi * psi);
    if (allow_extrapolation) os << ',' << (inside ? 0 : 1);
    os << '\n';
  }
  return os.str();
}

inline json state_observables(const Eigenstate& st, const RunConfig& c, const PotentialSpec& v) {
  json o;
  o["x"] = expectation(st.regions, OperatorSpec::position()).value;
  o["x2"] = expectation(st.regions, OperatorSpec::position_squared()).value;
  o["kinetic"] = expectation(st.regions, OperatorSpec::kinetic(c.params.mass, c.params.hbar)).value;
  if (v.kind() == PotentialSpec::Kind::Analytic) {
    o["potential"] = expectation(st.regions, OperatorSpec::potential(v.series())).value;
  }
  return o;
}

inline int run_solve(const RunConfig& c, std::ostream& out) {
  const PotentialSpec v = build_potential(c);
  const BoundProblem prob{v, {c.params.mass, c.params.hbar}};
  const BoundStates result = solve_bound_states(prob, scan_config(c, v));
  json j = result;
  for (std::size_t i = 0; i < result.states.size(); ++i) {
    const Eigenstate& st = result.states[i];
    j["states"][i]["observables"] = state_observables(st, c, v);
    if (c.potential == "finite_well") {
      // interior phase k a against its hard-wall limit (n + 1) pi / 2; the gap is the dilation
      const double k = std::sqrt(2.0 * c.params.mass * (st.energy + c.params.depth)) / c.params.hbar;
      j["states"][i]["well_phase"] = {{"ka", k * c.params.a},
                                      {"hard_wall", (st.n + 1) * std::numbers::pi / 2.0}};
    }
  }
  const std::string text = to_json_text(j);
  if (c.output.empty()) {
    out << text;
    return 0;
  }
  detail::write_file(c.output, text);
  for (const auto& st : result.states) {
    const Sample s = c.sample.value_or(Sample{st.interval.a(), st.interval.b(), 201});
    detail::write_file(detail::csv_path(c.output, "n" + std::to_string(st.n)),
                       sample_csv(st, s, c.allow_extrapolation));
  }
  return 0;
}

inline int run_scan(const RunConfig& c, std::ostream& out) {
  const PotentialSpec v = build_potential(c);
  const BoundProblem prob{v, {c.params.mass, c.params.hbar}};
  ScanConfig s = scan_config(c, v);
  s.validate();
  if (!v.dirichlet_half_width() && !(s.endpoint > 0.0)) s.endpoint = psse::detail::initial_endpoint(prob, s);
  const auto modes = psse::detail::shootings_for(s.parity);
  const std::size_t m = s.grid_points;
  std::vector<double> values(m * modes.size());
  psse::detail::parallel_for(values.size(), s.threads, [&](std::size_t k) {
    const double e = s.e_min + (s.e_max - s.e_min) * static_cast<double>(k % m) / static_cast<double>(m - 1);
    values[k] = endpoint_objective(prob, e, s, modes[k / m]);
  });
  std::ostringstream os;
  os << "energy,parity,objective\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double e = s.e_min + (s.e_max - s.e_min) * static_cast<double>(k % m) / static_cast<double>(m - 1);
    os << detail::real_text(e) << ',' << to_string(modes[k / m]) << ',' << detail::real_text(values[k]) << '\n';
  }
  if (c.output.empty()) {
    out << os.str();
  } else {
    detail::write_file(c.output, os.str());
  }
  return 0;
}

inline OdeCoefficients problem_ode(const RunConfig& c) {
  const PotentialSpec v = build_potential(c);
  const SchrodingerProblem sp(c.params.mass, c.params.hbar, v.local_at(0.0), c.energy);
  return schrodinger_ode(sp);
}

inline int run_series(const RunConfig& c, std::ostream& out) {
  const PowerSeries s = solve_series(problem_ode(c), c.seeds, c.n);
  json j{{"coefficients", s}, {"degree", s.degree()}, {"energy", c.energy},
         {"seeds", json::array({c.seeds.c0, c.seeds.c1})}};
  const std::string text = to_json_text(j);
  if (c.output.empty()) {
    out << text;
  } else {
    detail::write_file(c.output, text);
  }
  return 0;
}

inline int run_approx_report(const RunConfig& c, std::ostream& out) {
  const auto rows = maximin_report(problem_ode(c), c.seeds, Tolerance(c.params.tol), c.n_min, c.n, 1);
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"degree", r.degree}, {"interval", r.interval}, {"achieved_error", r.achieved_error},
                     {"length", r.interval.length()}});
  }
  json j{{"tolerance", c.params.tol}, {"energy", c.energy}, {"rows", table}};
  const std::string text = to_json_text(j);
  if (c.output.empty()) {
    out << text;
  } else {
    detail::write_file(c.output, text);
  }
  return 0;
}

/// Runs one workflow. Returns 0 on success, 1 on a validation error and 2 on a
/// numerical failure; diagnostics go to `err` as a single "CODE: message" line.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    switch (c.mode) {
      case Mode::Solve: return run_solve(c, out);
      case Mode::Scan: return run_scan(c, out);
      case Mode::Series: return run_series(c, out);
      case Mode::ApproxReport: return run_approx_report(c, out);
    }
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
  return 2;
}

/// Parses then runs; validation errors in the config map to exit status 1.
inline int run(const json& config, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = config_from_json(config);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "CONFIG_INVALID: " << e.what() << "\n";
    return 1;
  }
  return run(c, out, err);
}

}  // namespace psse::cli
