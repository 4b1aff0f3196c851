#pragma once

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loclab/sweep.hpp"

namespace loclab::cli {

// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 oracle-check failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitOracle = 3;

using nlohmann::json;

inline std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "model,N,M,delta,V,indicator,raw,normalized,status\n";
  for (const auto& row : result.rows) {
    out << row.model << ',' << row.n << ',' << row.m << ',' << io::format_double(row.delta)
        << ',' << io::format_double(row.v) << ',' << row.indicator << ','
        << io::format_double(row.raw) << ',' << io::format_double(row.normalized) << ','
        << row.status << '\n';
  }
  return out.str();
}

inline json sweep_json(const SweepConfig& config, const SweepResult& result) {
  json rows = json::array();
  for (const auto& row : result.rows)
    rows.push_back({{"model", row.model},
                    {"N", row.n},
                    {"M", row.m},
                    {"delta", row.delta},
                    {"V", row.v},
                    {"indicator", row.indicator},
                    {"raw", row.raw},
                    {"normalized", row.normalized},
                    {"status", row.status}});
  json meta = {{"version", kVersion},
               {"model", to_string(config.base.kind)},
               {"N", config.base.lattice.n_sites},
               {"M", config.base.lattice.filling},
               {"jobs", result.jobs_used},
               {"elapsed_ms", result.elapsed_ms},
               {"failures", result.failures},
               {"solver_diagnostics", result.solver_notes},
               {"reference",
                {{"r", result.reference.r},
                 {"rc", result.reference.rc},
                 {"mi", result.reference.mi},
                 {"lf", result.reference.lf}}}};
  return json{{"metadata", meta}, {"rows", rows}};
}

inline std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream out;
  out << "p_index,p_angle,C_p,bound,estimate,limit\n";
  for (const auto& row : rows) {
    out << row.p_index << ',' << io::format_double(row.p_angle) << ','
        << io::format_double(row.c_p) << ',' << io::format_double(row.bound) << ','
        << io::format_double(row.estimate) << ',' << io::format_double(row.limit) << '\n';
  }
  return out.str();
}

inline json verdict_json(const PointSpec& p, const analytics::PhaseVerdict& v,
                         const analytics::ClassifierThresholds& t) {
  json evidence = {{"exponent", v.exponent},
                   {"c_at_pi", v.c_at_pi},
                   {"max_cp", v.max_cp}};
  if (v.bound) evidence["ipr_bound"] = *v.bound;
  if (v.bound_margin) evidence["bound_margin"] = *v.bound_margin;
  return json{{"label", analytics::to_string(v.label)},
              {"evidence", evidence},
              {"thresholds",
               {{"extended_exponent_max", t.extended_exponent_max},
                {"quadratic_exponent_min", t.quadratic_exponent_min},
                {"dimer_plateau_tol", t.dimer_plateau_tol},
                {"localized_abs_max", t.localized_abs_max},
                {"bound_slack", t.bound_slack}}},
              {"model",
               {{"type", to_string(p.kind)},
                {"N", p.lattice.n_sites},
                {"M", p.lattice.filling},
                {"delta", p.delta},
                {"V", p.v},
                {"beta", p.effective_beta()}}}};
}

inline json report_json(const oracle::OracleReport& r) {
  return json{{"name", r.name},
              {"max_abs_deviation", r.max_abs_deviation},
              {"threshold", r.threshold},
              {"instances", r.instance_count},
              {"skipped", r.skipped},
              {"seed", r.seed},
              {"worst_instance", r.worst_instance},
              {"passed", r.passed()}};
}

// ---------------------------------------------------------------------------
// Option plumbing
// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string config_path;
  std::string model = "ssh";
  int n = 0;
  int filling = -1;  // -1 = half filling
  std::string boundary = "periodic";
  std::string delta = "0";
  std::string v = "0";
  double j = 1.0;
  double beta = 0.0;
  std::string beta_rational;  // "p/q"
  double phase = 0.0;
  std::string indicators = "r,rc,mi,lf";
  std::string out_path;
  std::string format = "csv";
  int jobs = 0;
  bool full_sf = false;
  bool no_wrap_interaction = false;
  int dense_threshold = 4000;
};

inline void add_common_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "config file (sections: model, lattice, grid, indicators, output, solver)");
  cmd->add_option("--model", o.model, "ssh | aa_free | aa_interacting");
  cmd->add_option("--n", o.n, "number of sites");
  cmd->add_option("--filling", o.filling, "particle count M (default N/2)");
  cmd->add_option("--boundary", o.boundary, "periodic | open");
  cmd->add_option("--delta", o.delta, "dimerization/potential strength, value or a:b:step");
  cmd->add_option("--v", o.v, "interaction strength, value or a:b:step");
  cmd->add_option("--j", o.j, "hopping strength");
  cmd->add_option("--beta", o.beta, "quasiperiodic wave number (default (sqrt(5)-1)/2)");
  cmd->add_option("--beta-rational", o.beta_rational, "rational approximant p/q for beta");
  cmd->add_option("--phase", o.phase, "potential phase offset");
  cmd->add_option("--indicators", o.indicators, "comma subset of r,rc,mi,lf");
  cmd->add_option("--out", o.out_path, "output path");
  cmd->add_option("--format", o.format, "csv | json");
  cmd->add_option("--jobs", o.jobs, "max concurrent grid points (0 = all cores)");
  cmd->add_flag("--full-sf", o.full_sf, "compute the full structure-factor matrix");
  cmd->add_flag("--no-wrap-interaction", o.no_wrap_interaction,
                "drop the (N,1) interaction bond on periodic chains");
  cmd->add_option("--dense-threshold", o.dense_threshold,
                  "largest dimension solved densely (default 4000)");
}

/// Config-file values fill any option the command line left untouched.
inline void merge_config_file(const CLI::App* cmd, CommonOptions& o) {
  if (o.config_path.empty()) return;
  const auto kv = io::parse_config_file(o.config_path);
  auto unset = [&](const char* flag) { return cmd->count(flag) == 0; };
  auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  if (unset("--model")) if (auto s = get("model.type")) o.model = *s;
  if (unset("--j")) if (auto s = get("model.j")) o.j = std::stod(*s);
  if (unset("--beta")) if (auto s = get("model.beta")) o.beta = std::stod(*s);
  if (unset("--beta-rational")) if (auto s = get("model.beta_rational")) o.beta_rational = *s;
  if (unset("--phase")) if (auto s = get("model.phase")) o.phase = std::stod(*s);
  if (unset("--n")) if (auto s = get("lattice.n")) o.n = std::stoi(*s);
  if (unset("--filling")) if (auto s = get("lattice.filling")) o.filling = std::stoi(*s);
  if (unset("--boundary")) if (auto s = get("lattice.boundary")) o.boundary = *s;
  if (unset("--delta")) if (auto s = get("grid.delta")) o.delta = *s;
  if (unset("--v")) if (auto s = get("grid.v")) o.v = *s;
  if (unset("--indicators")) if (auto s = get("indicators.set")) o.indicators = *s;
  if (unset("--out")) if (auto s = get("output.path")) o.out_path = *s;
  if (unset("--format")) if (auto s = get("output.format")) o.format = *s;
  if (unset("--jobs")) if (auto s = get("solver.jobs")) o.jobs = std::stoi(*s);
  if (unset("--dense-threshold"))
    if (auto s = get("solver.dense_threshold")) o.dense_threshold = std::stoi(*s);
  if (unset("--full-sf")) if (auto s = get("solver.full_sf")) o.full_sf = (*s == "true" || *s == "1");
  if (unset("--no-wrap-interaction"))
    if (auto s = get("solver.wrap_interaction"))
      o.no_wrap_interaction = (*s == "false" || *s == "0");
}

inline double parse_beta(const CommonOptions& o) {
  if (!o.beta_rational.empty()) {
    const auto parts = io::split(o.beta_rational, '/');
    if (parts.size() != 2)
      throw std::invalid_argument("--beta-rational expects p/q (got '" + o.beta_rational + "')");
    const double q = std::stod(parts[1]);
    if (q == 0.0) throw std::invalid_argument("--beta-rational: zero denominator");
    return std::stod(parts[0]) / q;
  }
  return o.beta;
}

inline PointSpec point_from_options(const CommonOptions& o) {
  PointSpec p;
  p.kind = model_from_string(o.model);
  if (o.n < 1) throw std::invalid_argument("need --n (or lattice.n in the config file)");
  p.lattice.n_sites = o.n;
  p.lattice.filling = o.filling >= 0 ? o.filling : o.n / 2;
  if (o.boundary == "periodic") p.lattice.boundary = Boundary::periodic;
  else if (o.boundary == "open") p.lattice.boundary = Boundary::open;
  else throw std::invalid_argument("boundary must be periodic or open");
  p.j = o.j;
  p.beta = parse_beta(o);
  p.phase = o.phase;
  p.wrap_interaction = !o.no_wrap_interaction;
  p.full_sf = o.full_sf;
  p.dense_threshold = o.dense_threshold;
  return p;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"localization diagnostics for 1D lattice models"};
  app.require_subcommand(1);

  CommonOptions sweep_opts, curve_opts, classify_opts;
  std::string check_suite_name;
  std::string check_out;

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep of the indicators");
  add_common_options(sweep_cmd, sweep_opts);
  auto* curve_cmd = app.add_subcommand("locfunc", "localization-function curve at one point");
  add_common_options(curve_cmd, curve_opts);
  auto* classify_cmd = app.add_subcommand("classify", "phase verdict at one point");
  add_common_options(classify_cmd, classify_opts);
  auto* check_cmd = app.add_subcommand("check", "run oracle comparison suites");
  check_cmd->add_option("suite", check_suite_name, "wick | structure | frechet | free-limit | all")
      ->required();
  check_cmd->add_option("--out", check_out, "write the report JSON here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sweep_cmd->parsed()) {
      merge_config_file(sweep_cmd, sweep_opts);
      SweepConfig config;
      config.base = point_from_options(sweep_opts);
      config.delta_grid = io::parse_grid(sweep_opts.delta);
      config.v_grid = io::parse_grid(sweep_opts.v);
      config.base.v = config.v_grid.start;
      config.indicators = io::split(sweep_opts.indicators, ',');
      config.out_path = sweep_opts.out_path.empty()
                            ? std::string("sweep.") + sweep_opts.format
                            : sweep_opts.out_path;
      config.format = sweep_opts.format;
      config.jobs = sweep_opts.jobs;
      config.validate();

      const auto result = run_sweep(config);
      if (config.format == "csv")
        io::atomic_write(config.out_path, sweep_csv(result));
      else
        io::atomic_write(config.out_path, sweep_json(config, result).dump(2) + "\n");
      std::cout << result.rows.size() << " rows -> " << config.out_path << "\n";
      if (!result.failures.empty()) {
        for (const auto& f : result.failures) std::cerr << "failed: " << f << "\n";
        return kExitNumerical;
      }
      return kExitOk;
    }
    if (curve_cmd->parsed()) {
      merge_config_file(curve_cmd, curve_opts);
      PointSpec p = point_from_options(curve_opts);
      p.delta = io::parse_grid(curve_opts.delta).start;
      p.v = io::parse_grid(curve_opts.v).start;
      const auto rows = locfunc_curve(p);
      const std::string path = curve_opts.out_path.empty() ? "locfunc.csv" : curve_opts.out_path;
      io::atomic_write(path, curve_csv(rows));
      std::cout << rows.size() << " rows -> " << path << "\n";
      return kExitOk;
    }
    if (classify_cmd->parsed()) {
      merge_config_file(classify_cmd, classify_opts);
      PointSpec p = point_from_options(classify_opts);
      p.delta = io::parse_grid(classify_opts.delta).start;
      p.v = io::parse_grid(classify_opts.v).start;
      const analytics::ClassifierThresholds thresholds;
      const auto verdict = classify_point(p, thresholds);
      const std::string text = verdict_json(p, verdict, thresholds).dump(2) + "\n";
      if (classify_opts.out_path.empty())
        std::cout << text;
      else
        io::atomic_write(classify_opts.out_path, text);
      return kExitOk;
    }
    // check
    const auto reports = check_suite(check_suite_name);
    json out = json::array();
    bool all_passed = true;
    for (const auto& r : reports) {
      out.push_back(report_json(r));
      all_passed = all_passed && r.passed();
    }
    const std::string text = out.dump(2) + "\n";
    if (check_out.empty())
      std::cout << text;
    else
      io::atomic_write(check_out, text);
    return all_passed ? kExitOk : kExitOracle;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace loclab::cli
