#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "loclab/analytics.hpp"
#include "loclab/correlations.hpp"
#include "loclab/freefermion.hpp"
#include "loclab/indicators.hpp"
#include "loclab/io.hpp"
#include "loclab/manybody.hpp"
#include "loclab/models.hpp"
#include "loclab/oracle.hpp"

namespace loclab::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class ModelKind { ssh, aa_free, aa_interacting };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::ssh: return "ssh";
    case ModelKind::aa_free: return "aa_free";
    default: return "aa_interacting";
  }
}

inline ModelKind model_from_string(const std::string& s) {
  if (s == "ssh") return ModelKind::ssh;
  if (s == "aa_free") return ModelKind::aa_free;
  if (s == "aa_interacting") return ModelKind::aa_interacting;
  throw std::invalid_argument("unknown model '" + s + "' (ssh | aa_free | aa_interacting)");
}

/// One model evaluation point.
struct PointSpec {
  ModelKind kind = ModelKind::ssh;
  LatticeSpec lattice;
  double j = 1.0;
  double delta = 0.0;
  double beta = 0.0;  // 0 picks the default golden-ratio value for AA models
  double phase = 0.0;
  double v = 0.0;
  bool wrap_interaction = true;
  bool full_sf = false;
  double solver_tol = 1e-9;
  int dense_threshold = 4000;

  double effective_beta() const { return beta != 0.0 ? beta : golden_beta(); }
};

struct PointResult {
  freefermion::CorrelationData corr;
  std::optional<freefermion::OrbitalSet> orbitals;  // free path only
  correlations::JointDistribution joint;
  correlations::StructureFactor sf;
  indicators::RawIndicators raw;
  manybody::SolverDiagnostics diagnostics;
  std::optional<Eigen::VectorXcd> amplitudes;  // many-body path only
};

inline models::SingleParticleHamiltonian build_single_particle(const PointSpec& p) {
  switch (p.kind) {
    case ModelKind::ssh:
      return models::build_ssh(p.lattice.n_sites, p.delta, p.lattice.boundary);
    default:
      return models::build_aa_single(p.lattice.n_sites, p.j, p.delta, p.effective_beta(),
                                     p.phase, p.lattice.boundary);
  }
}

/// Full pipeline for one point: model -> correlators (Wick or exact
/// diagonalization) -> bivariate law, structure factor and the four raw
/// indicators.
inline PointResult evaluate_point(const PointSpec& p,
                                  std::optional<Eigen::VectorXcd> previous = {}) {
  p.lattice.validate();
  PointResult r;
  const int m = p.lattice.filling;

  if (p.kind == ModelKind::aa_interacting) {
    models::ManyBodyHamiltonianSpec spec;
    spec.lattice = p.lattice;
    spec.j = p.j;
    spec.delta = p.delta;
    spec.beta = p.effective_beta();
    spec.phase = p.phase;
    spec.v = p.v;
    spec.wrap_interaction = p.wrap_interaction;
    const auto basis = manybody::build_basis(p.lattice.n_sites, m);
    const auto h = manybody::assemble(models::build_aa_manybody(spec), basis);
    const auto state =
        manybody::ground_state(h, basis, p.solver_tol, previous, p.dense_threshold);
    r.corr = manybody::density_density_mb(state);
    r.diagnostics = state.diagnostics;
    r.amplitudes = state.amplitudes;
  } else {
    const auto h = build_single_particle(p);
    auto orb = freefermion::diagonalize(h, m);
    r.corr = freefermion::correlations_from_fermi_sea(orb);
    r.orbitals = std::move(orb);
  }

  r.joint = correlations::joint_distribution(r.corr, m);
  r.sf = correlations::structure_factor(r.corr, p.full_sf);
  r.raw.r = indicators::lt_resta(r.corr);
  r.raw.rc = indicators::lt_riemann(r.joint);
  r.raw.mi = p.lattice.n_sites * indicators::mutual_information(r.joint);
  r.raw.lf = indicators::lt_locfunc(r.sf);
  return r;
}

/// Free point at identical (N, M, boundary): delta = 0, V = 0, Wick path.
inline PointSpec reference_spec(const PointSpec& p) {
  PointSpec ref = p;
  ref.delta = 0.0;
  ref.v = 0.0;
  if (ref.kind == ModelKind::aa_interacting) ref.kind = ModelKind::aa_free;
  return ref;
}

inline indicators::IndicatorReport evaluate_with_reference(const PointSpec& p) {
  const auto ref = evaluate_point(reference_spec(p));
  const auto res = evaluate_point(p);
  auto report = indicators::normalize(res.raw, ref.raw, p.lattice.n_sites, p.lattice.filling);
  report.model = to_string(p.kind);
  report.delta = p.delta;
  report.v = p.v;
  return report;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
  PointSpec base;
  io::GridRange delta_grid{0.0, 0.0, 1.0};
  io::GridRange v_grid{0.0, 0.0, 1.0};
  std::vector<std::string> indicators = {"lf", "mi", "r", "rc"};
  std::string out_path = "sweep.csv";
  std::string format = "csv";
  int jobs = 0;  // 0 = hardware concurrency

  void validate() const {
    base.lattice.validate();
    if (indicators.empty()) throw std::invalid_argument("sweep: need at least one indicator");
    for (const auto& name : indicators)
      if (name != "r" && name != "rc" && name != "mi" && name != "lf")
        throw std::invalid_argument("sweep: unknown indicator '" + name + "'");
    if (base.lattice.boundary != Boundary::periodic)
      throw std::invalid_argument("sweep: indicators are defined for periodic chains");
    if (base.kind == ModelKind::aa_interacting && base.lattice.n_sites > 18)
      throw std::invalid_argument("sweep: interacting model limited to N <= 18");
    if (format != "csv" && format != "json")
      throw std::invalid_argument("sweep: format must be csv or json");
  }
};

struct SweepRow {
  std::string model;
  int n = 0;
  int m = 0;
  double delta = 0.0;
  double v = 0.0;
  std::string indicator;
  double raw = std::numeric_limits<double>::quiet_NaN();
  double normalized = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
};

struct SweepResult {
  std::vector<SweepRow> rows;
  indicators::RawIndicators reference;
  std::vector<std::string> failures;
  std::vector<std::string> solver_notes;  // many-body path diagnostics
  double elapsed_ms = 0.0;
  int jobs_used = 1;
};

namespace detail {

struct PointOutcome {
  indicators::RawIndicators raw;
  bool failed = false;
  std::string error;
  std::string solver_note;
};

inline double pick(const indicators::RawIndicators& r, const std::string& name) {
  if (name == "r") return r.r;
  if (name == "rc") return r.rc;
  if (name == "mi") return r.mi;
  return r.lf;
}

}  // namespace detail

/// Evaluate the grid and assemble one row per (point, indicator), ordered by
/// grid coordinates then indicator name. Free-model points run concurrently;
/// the interacting model runs in ascending delta order so a degenerate
/// ground state can follow the previous point.
inline SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const auto deltas = io::expand(config.delta_grid);
  const auto vs = config.base.kind == ModelKind::aa_interacting
                      ? io::expand(config.v_grid)
                      : std::vector<double>{config.base.v};
  if (deltas.empty() || vs.empty()) throw std::invalid_argument("sweep: empty grid");

  std::vector<std::string> names = config.indicators;
  std::sort(names.begin(), names.end());

  SweepResult result;
  const auto reference = evaluate_point(reference_spec(config.base));
  result.reference = reference.raw;

  struct GridPoint {
    double v;
    double delta;
  };
  std::vector<GridPoint> points;
  for (const double v : vs)
    for (const double d : deltas) points.push_back({v, d});

  std::vector<detail::PointOutcome> outcomes(points.size());
  auto evaluate_one = [&](std::size_t i, std::optional<Eigen::VectorXcd>& carry) {
    PointSpec spec = config.base;
    spec.delta = points[i].delta;
    spec.v = points[i].v;
    try {
      const auto res = evaluate_point(spec, carry);
      outcomes[i].raw = res.raw;
      carry = res.amplitudes;
      if (!res.diagnostics.method.empty()) {
        std::ostringstream note;
        note << "delta=" << points[i].delta << " v=" << points[i].v << ": "
             << res.diagnostics.method << " iterations=" << res.diagnostics.iterations
             << " residual=" << res.diagnostics.residual;
        outcomes[i].solver_note = note.str();
      }
    } catch (const std::exception& e) {
      outcomes[i].failed = true;
      std::ostringstream msg;
      msg << "point delta=" << points[i].delta << " v=" << points[i].v << ": " << e.what();
      outcomes[i].error = msg.str();
      carry.reset();
    }
  };

  if (config.base.kind == ModelKind::aa_interacting) {
    result.jobs_used = 1;
    std::optional<Eigen::VectorXcd> carry;
    for (std::size_t i = 0; i < points.size(); ++i) evaluate_one(i, carry);
  } else {
    int jobs = config.jobs > 0 ? config.jobs
                               : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
    result.jobs_used = jobs;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      std::optional<Eigen::VectorXcd> unused;
      for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
        unused.reset();
        evaluate_one(i, unused);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (outcomes[i].failed) result.failures.push_back(outcomes[i].error);
    if (!outcomes[i].solver_note.empty()) result.solver_notes.push_back(outcomes[i].solver_note);
    for (const auto& name : names) {
      SweepRow row;
      row.model = to_string(config.base.kind);
      row.n = config.base.lattice.n_sites;
      row.m = config.base.lattice.filling;
      row.delta = points[i].delta;
      row.v = points[i].v;
      row.indicator = name;
      if (!outcomes[i].failed) {
        row.raw = detail::pick(outcomes[i].raw, name);
        const double ref = detail::pick(result.reference, name);
        if (!(ref > 0.0)) throw std::runtime_error("sweep: non-positive reference for " + name);
        row.normalized = row.raw / ref;
      } else {
        row.status = "failed";
      }
      result.rows.push_back(row);
    }
  }

  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ---------------------------------------------------------------------------
// Localization-function curve and classification
// ---------------------------------------------------------------------------

struct CurveRow {
  int p_index = 0;
  double p_angle = 0.0;
  double c_p = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double limit = std::numeric_limits<double>::quiet_NaN();
};

/// C~(p) for p = 0..N/2 with the IPR bound and orbital estimate when the
/// free path provides orbitals, and the large-N quadrature value for the
/// dimerized chain.
inline std::vector<CurveRow> locfunc_curve(const PointSpec& p) {
  const auto res = evaluate_point(p);
  const int n = p.lattice.n_sites;
  const double bound =
      res.orbitals ? analytics::ipr_bound(*res.orbitals) : std::numeric_limits<double>::quiet_NaN();
  std::vector<CurveRow> rows;
  for (int idx = 0; idx <= n / 2; ++idx) {
    CurveRow row;
    row.p_index = idx;
    row.p_angle = res.sf.angle(idx);
    row.c_p = res.sf.diagonal(idx);
    row.bound = bound;
    if (res.orbitals) row.estimate = analytics::locfunc_localized_estimate(*res.orbitals, idx);
    if (p.kind == ModelKind::ssh) row.limit = analytics::ssh_locfunc_limit(row.p_angle, p.delta);
    rows.push_back(row);
  }
  return rows;
}

inline analytics::PhaseVerdict classify_point(const PointSpec& p,
                                              const analytics::ClassifierThresholds& t = {}) {
  const auto res = evaluate_point(p);
  return analytics::classify(res.sf, res.orbitals ? &*res.orbitals : nullptr, t);
}

// ---------------------------------------------------------------------------
// Oracle check suites
// ---------------------------------------------------------------------------

inline std::vector<oracle::OracleReport> check_suite(const std::string& name) {
  std::vector<oracle::OracleReport> reports;

  const auto run_wick = [&]() {
    reports.push_back(oracle::ed_free_check(6, 3, 50));
  };
  const auto run_structure = [&]() {
    oracle::OracleReport rep;
    rep.name = "transform_vs_double_sum";
    rep.threshold = 1e-12;
    for (const double delta : {0.0, 0.5}) {
      const auto h = models::build_ssh(12, delta, Boundary::periodic);
      const auto cd = freefermion::correlations_from_fermi_sea(freefermion::diagonalize(h, 6));
      const auto fast = correlations::structure_factor(cd, true);
      const auto naive = oracle::structure_factor_naive(cd);
      const double dev = (*fast.full - naive).cwiseAbs().maxCoeff();
      ++rep.instance_count;
      if (dev > rep.max_abs_deviation) {
        rep.max_abs_deviation = dev;
        rep.worst_instance = "ssh N=12 delta=" + io::format_double(delta);
      }
    }
    reports.push_back(rep);
  };
  const auto run_frechet = [&]() {
    oracle::OracleReport rep;
    rep.name = "frechet_cut_enumeration_vs_grid";
    rep.seed = 0xf3c4e7u;
    const int resolution = 10000;
    rep.threshold = std::pow(2.0 * M_PI / resolution, 2);
    std::mt19937 rng(rep.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int inst = 0; inst < 100; ++inst) {
      Eigen::VectorXd g(50);
      for (int i = 0; i < 50; ++i) g(i) = u(rng);
      g /= g.sum();
      const auto exact = indicators::frechet_variance(g);
      const auto grid = oracle::frechet_grid(g, resolution);
      const double dev = std::abs(grid.variance - exact.variance);
      ++rep.instance_count;
      if (dev > rep.max_abs_deviation) {
        rep.max_abs_deviation = dev;
        rep.worst_instance = "instance " + std::to_string(inst);
      }
    }
    reports.push_back(rep);
  };
  const auto run_free_limit = [&]() {
    oracle::OracleReport energy_rep, corr_rep;
    energy_rep.name = "free_limit_energy";
    energy_rep.threshold = 1e-10;
    corr_rep.name = "free_limit_correlator";
    corr_rep.threshold = 1e-9;
    for (const int n : {6, 8, 10}) {
      const int m = n / 2;
      PointSpec p;
      p.kind = ModelKind::aa_interacting;
      p.lattice = {n, Boundary::periodic, m};
      p.delta = 1.0;
      p.v = 0.0;
      const auto mb = evaluate_point(p);
      PointSpec pf = p;
      pf.kind = ModelKind::aa_free;
      const auto free = evaluate_point(pf);

      const auto h = build_single_particle(pf);
      const auto orb = freefermion::diagonalize(h, m);
      const double free_energy = orb.energies.head(m).sum();

      models::ManyBodyHamiltonianSpec spec;
      spec.lattice = p.lattice;
      spec.delta = p.delta;
      spec.beta = p.effective_beta();
      const auto basis = manybody::build_basis(n, m);
      const auto hm = manybody::assemble(models::build_aa_manybody(spec), basis);
      const auto gs = manybody::ground_state(hm, basis);

      const double edev = std::abs(gs.energy - free_energy);
      ++energy_rep.instance_count;
      if (edev > energy_rep.max_abs_deviation) {
        energy_rep.max_abs_deviation = edev;
        energy_rep.worst_instance = "N=" + std::to_string(n);
      }
      const double cdev = (mb.corr.c - free.corr.c).cwiseAbs().maxCoeff();
      ++corr_rep.instance_count;
      if (cdev > corr_rep.max_abs_deviation) {
        corr_rep.max_abs_deviation = cdev;
        corr_rep.worst_instance = "N=" + std::to_string(n);
      }
    }
    reports.push_back(energy_rep);
    reports.push_back(corr_rep);
  };

  if (name == "wick") run_wick();
  else if (name == "structure") run_structure();
  else if (name == "frechet") run_frechet();
  else if (name == "free-limit") run_free_limit();
  else if (name == "all") {
    run_wick();
    run_structure();
    run_frechet();
    run_free_limit();
  } else {
    throw std::invalid_argument("unknown check suite '" + name +
                                "' (wick | structure | frechet | free-limit | all)");
  }
  return reports;
}

}  // namespace loclab::cli
