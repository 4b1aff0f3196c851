#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "loclab/correlations.hpp"
#include "loclab/freefermion.hpp"
#include "loclab/lattice.hpp"

namespace loclab::analytics {

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("quadrature failed to converge");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  // Endpoint samples are taken a hair inside the panel: the integrable
  // kinks sit exactly at the panel edges, where the raw integrand is an
  // indeterminate 0/0 rather than its one-sided limit. The floor keeps the
  // sample clear of the flat rounding neighbourhood of cos around +-1
  // (half-width ~1.5e-8), where the kink sits when p is 0 or pi.
  const double inset = std::max(1e-9 * (b - a), 2e-8);
  const double fa = f(a + inset), fm = f(m), fb = f(b - inset);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// Thermodynamic-limit localization function of the dimerized chain:
/// C~(p) = 1/4 - (1/8 pi) Int_0^{2 pi} dp' (cos p + a cos p') /
/// sqrt((cos p + a cos p')^2 + (1 - a^2) sin^2 p), a = (1-d^2)/(1+d^2).
/// The integrand develops a kink where cos p' = -cos p as d -> 0; the
/// integration range is split there so adaptive refinement stays cheap.
inline double ssh_locfunc_limit(double p, double delta, double tol = 1e-10) {
  if (delta < -1.0 || delta > 1.0)  // even in delta: only delta^2 enters
    throw std::invalid_argument("ssh_locfunc_limit: delta must lie in [-1, 1]");
  if (p < -1e-12 || p > M_PI + 1e-12)
    throw std::invalid_argument("ssh_locfunc_limit: p must lie in [0, pi]");
  p = std::clamp(p, 0.0, M_PI);
  // p = 0: the integrand is +1 almost everywhere for a <= 1, so the
  // integral equals 2 pi exactly and C~(0) = 0.
  if (p == 0.0) return 0.0;

  const double a = (1.0 - delta * delta) / (1.0 + delta * delta);
  const double cp = std::cos(p);
  const double s2 = (1.0 - a * a) * std::sin(p) * std::sin(p);
  auto integrand = [&](double q) {
    const double u = cp + a * std::cos(q);
    const double root = std::sqrt(u * u + s2);
    return root > 0.0 ? u / root : 0.0;
  };

  const double split1 = M_PI - p, split2 = M_PI + p;
  const double itol = tol * 8.0 * M_PI / 3.0;
  double integral = 0.0;
  integral += detail::integrate(integrand, 0.0, split1, itol);
  integral += detail::integrate(integrand, split1, split2, itol);
  integral += detail::integrate(integrand, split2, 2.0 * M_PI, itol);
  return 0.25 - integral / (8.0 * M_PI);
}

/// Large-N localization tensor (1/2) d^2 C~/dp^2 at p = 0, by Richardson
/// extrapolation of central second differences with steps 1e-2, 5e-3,
/// 2.5e-3 (C~ is even in p, so the stencil folds onto [0, pi]).
inline double lt_thermodynamic(double delta) {
  if (delta <= 0.0)
    throw std::invalid_argument(
        "lt_thermodynamic: divergent at delta = 0 (gapless chain); need delta > 0");
  const double qtol = 1e-12;
  const double c0 = ssh_locfunc_limit(0.0, delta, qtol);
  auto second_diff = [&](double h) {
    return 2.0 * (ssh_locfunc_limit(h, delta, qtol) - c0) / (h * h);
  };
  const double d1 = second_diff(1e-2);
  const double d2 = second_diff(5e-3);
  const double d3 = second_diff(2.5e-3);
  const double r12 = (4.0 * d2 - d1) / 3.0;
  const double r23 = (4.0 * d3 - d2) / 3.0;
  const double second = (16.0 * r23 - r12) / 15.0;
  return 0.5 * second;
}

/// Occupied-orbital estimate of the localization function at momentum
/// index p: (1/N) sum_k (1 - |rho~_k(p)|^2) with rho~_k the Fourier
/// transform of the orbital density. Exact zero at p = 0.
inline double locfunc_localized_estimate(const freefermion::OrbitalSet& orb, int p) {
  if (orb.n_occupied < 1)
    throw std::invalid_argument("locfunc_localized_estimate: empty Fermi sea");
  const int n = orb.n_sites();
  if (p == 0) return 0.0;
  double total = 0.0;
  for (int k = 0; k < orb.n_occupied; ++k) {
    std::complex<double> rho(0.0, 0.0);
    for (int m = 0; m < n; ++m) {
      const double w = std::norm(orb.orbitals(m, k));
      const long long mp = static_cast<long long>(m + 1) * p;
      rho += w * std::exp(std::complex<double>(0.0, momentum_angle(static_cast<int>(mp % n), n)));
    }
    total += 1.0 - std::norm(rho);
  }
  return total / static_cast<double>(n);
}

/// p-independent bound on the localization function from occupied-orbital
/// inverse participation ratios: (1/N) sum_k (2 - 2 R_k).
inline double ipr_bound(const freefermion::OrbitalSet& orb) {
  if (orb.n_occupied < 1) throw std::invalid_argument("ipr_bound: empty Fermi sea");
  double total = 0.0;
  for (int k = 0; k < orb.n_occupied; ++k) total += 2.0 - 2.0 * freefermion::ipr(orb, k);
  return total / static_cast<double>(orb.n_sites());
}

struct AsymptoticFit {
  double exponent = 0.0;
  int p_lo = 0;
  int p_hi = 0;
  double residual = 0.0;  // rms residual of the log-log fit
};

/// Least-squares slope of log C~_p against log(2 pi p / N) over a
/// small-momentum window (default p in [1, max(4, N/100)]).
inline AsymptoticFit fit_small_p(const correlations::StructureFactor& sf, int p_lo = 1,
                                 int p_hi = 0) {
  const int n = sf.n_sites;
  if (p_hi <= 0) p_hi = std::max(4, n / 100);
  if (p_lo < 1 || p_hi < p_lo || p_hi > std::max(1, n / 20))
    throw std::invalid_argument("fit_small_p: window must lie within 1 <= p <= N/20");

  std::vector<double> lx, ly;
  const double floor_value = 10.0 * std::numeric_limits<double>::epsilon();
  for (int p = p_lo; p <= p_hi; ++p) {
    if (sf.diagonal(p) <= floor_value) continue;
    lx.push_back(std::log(sf.angle(p)));
    ly.push_back(std::log(sf.diagonal(p)));
  }
  if (lx.size() < 3)
    throw std::runtime_error("fit_small_p: fewer than 3 usable points in the window");

  const auto npts = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / npts;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - slope * lx[i] - intercept;
    ss += r * r;
  }
  return AsymptoticFit{slope, p_lo, p_hi, std::sqrt(ss / npts)};
}

enum class Phase { extended, localized, dimerized, inconclusive };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::extended: return "extended";
    case Phase::localized: return "localized";
    case Phase::dimerized: return "dimerized";
    default: return "inconclusive";
  }
}

struct ClassifierThresholds {
  double extended_exponent_max = 1.4;
  double quadratic_exponent_min = 1.6;
  double dimer_plateau_tol = 0.05;   // |C~(pi) - 1/2| window
  double localized_abs_max = 0.3;    // fallback when no orbitals are available
  double bound_slack = 0.02;         // tolerance on the approximate IPR bound
};

struct PhaseVerdict {
  Phase label = Phase::inconclusive;
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double c_at_pi = std::numeric_limits<double>::quiet_NaN();
  double max_cp = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> bound;
  std::optional<double> bound_margin;  // bound - max_p C~_p
};

/// Small-p exponent separates extended (linear) from dimerized/localized
/// (quadratic); the finite-momentum behaviour separates the latter two:
/// a plateau C~(pi) ~ 1/2 marks dimerization, suppression below the IPR
/// bound (or an absolute ceiling) marks localization.
inline PhaseVerdict classify(const correlations::StructureFactor& sf,
                             const freefermion::OrbitalSet* orb = nullptr,
                             const ClassifierThresholds& t = {}) {
  PhaseVerdict v;
  const int n = sf.n_sites;
  v.c_at_pi = sf.diagonal(n / 2);
  v.max_cp = sf.diagonal.maxCoeff();
  if (orb != nullptr) {
    v.bound = ipr_bound(*orb);
    v.bound_margin = *v.bound - v.max_cp;
  }
  try {
    v.exponent = fit_small_p(sf).exponent;
  } catch (const std::exception&) {
    return v;  // inconclusive
  }

  if (v.exponent < t.extended_exponent_max) {
    v.label = Phase::extended;
  } else if (v.exponent > t.quadratic_exponent_min) {
    if (std::abs(v.c_at_pi - 0.5) < t.dimer_plateau_tol) {
      v.label = Phase::dimerized;
    } else if ((v.bound_margin && *v.bound_margin >= -t.bound_slack) ||
               v.max_cp < t.localized_abs_max) {
      v.label = Phase::localized;
    }
  }
  return v;
}

}  // namespace loclab::analytics
