// psse: power-series Schrodinger solver front end.
//
//   psse solve --potential harmonic --omega 1 --energy-range 0 6 --tol 1e-10
//   psse series --potential linear --efield 1 --energy 0 --seeds 1 0 --n 9
//
// Flags are merged over the keys of --config FILE (a JSON object).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "psse/cli.hpp"

using psse::cli::json;

int main(int argc, char** argv) {
  CLI::App app{"Power-series solver for second-order linear ODEs and the 1-D Schrodinger equation"};
  app.allow_extras(false);

  std::string mode, mode_flag, config_path, potential, parity, output;
  double mass = 0, hbar = 0, tol = 0, omega = 0, efield = 0, width = 0, depth = 0, extent = 0, energy = 0,
         endpoint = 0;
  std::size_t n_max = 0, n = 0, n_min = 0, degree = 0, grid = 0;
  std::vector<double> energy_range, seeds, sample, coefficients;
  bool allow_extrapolation = false;

  app.add_option("command", mode, "solve | scan | series | approx-report");
  app.add_option("--mode", mode_flag, "same as the positional mode");
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--potential", potential, "infinite_well | finite_well | linear | harmonic | polynomial | piecewise");
  app.add_option("--mass", mass, "particle mass (default 1)");
  app.add_option("--hbar", hbar, "reduced Planck constant (default 1)");
  app.add_option("--tol", tol, "tolerance (default 1e-10)");
  app.add_option("--n-max", n_max, "largest series degree (default 4000)");
  app.add_option("--energy-range", energy_range, "scan range LO HI")->expected(2);
  app.add_option("--parity", parity, "even | odd | both | none");
  app.add_option("--seeds", seeds, "c0 c1")->expected(2);
  app.add_option("--sample", sample, "CSV sampling MIN MAX COUNT")->expected(3);
  app.add_option("--output", output, "output path (stdout when omitted)");
  app.add_flag("--allow-extrapolation", allow_extrapolation, "keep CSV samples outside the certified interval");
  app.add_option("--omega", omega, "oscillator frequency");
  app.add_option("--efield", efield, "slope of the linear potential");
  app.add_option("--width", width, "well half-width a");
  app.add_option("--depth", depth, "finite well depth V0");
  app.add_option("--extent", extent, "finite well computational half-width");
  app.add_option("--coeffs", coefficients, "polynomial potential coefficients V0 V1 ...");
  app.add_option("--energy", energy, "energy for series / approx-report");
  app.add_option("--n", n, "series degree; largest degree for approx-report");
  app.add_option("--n-min", n_min, "smallest degree for approx-report");
  app.add_option("--degree", degree, "starting origin-series degree for shooting");
  app.add_option("--endpoint", endpoint, "shooting half-width b (auto when omitted)");
  app.add_option("--grid", grid, "energy scan grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "CONFIG_PARSE: " << e.what() << "\n";
    return 1;
  }

  json cfg = json::object();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "CONFIG_PARSE: cannot read '" << config_path << "'\n";
      return 1;
    }
    try {
      cfg = json::parse(f);
    } catch (const json::exception& e) {
      std::cerr << "CONFIG_PARSE: " << e.what() << "\n";
      return 1;
    }
  }
  const auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("command")) cfg["mode"] = mode;
  if (given("--mode")) {
    if (given("command") && mode != mode_flag) {
      std::cerr << "CONFIG_MODE: positional mode and --mode disagree\n";
      return 1;
    }
    cfg["mode"] = mode_flag;
  }
  if (given("--potential")) cfg["potential"] = potential;
  if (given("--mass")) cfg["mass"] = mass;
  if (given("--hbar")) cfg["hbar"] = hbar;
  if (given("--tol")) cfg["tol"] = tol;
  if (given("--n-max")) cfg["n_max"] = n_max;
  if (given("--energy-range")) cfg["energy_range"] = energy_range;
  if (given("--parity")) cfg["parity"] = parity;
  if (given("--seeds")) cfg["seeds"] = seeds;
  if (given("--sample")) cfg["sample"] = sample;
  if (given("--output")) cfg["output"] = output;
  if (given("--allow-extrapolation")) cfg["allow_extrapolation"] = allow_extrapolation;
  if (given("--omega")) cfg["omega"] = omega;
  if (given("--efield")) cfg["efield"] = efield;
  if (given("--width")) cfg["width"] = width;
  if (given("--depth")) cfg["depth"] = depth;
  if (given("--extent")) cfg["extent"] = extent;
  if (given("--coeffs")) cfg["coefficients"] = coefficients;
  if (given("--energy")) cfg["energy"] = energy;
  if (given("--n")) cfg["n"] = n;
  if (given("--n-min")) cfg["n_min"] = n_min;
  if (given("--degree")) cfg["degree"] = degree;
  if (given("--endpoint")) cfg["endpoint"] = endpoint;
  if (given("--grid")) cfg["grid"] = grid;

  return psse::cli::run(cfg, std::cout, std::cerr);
}
