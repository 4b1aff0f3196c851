#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "loclab/correlations.hpp"
#include "loclab/freefermion.hpp"
#include "loclab/lattice.hpp"

namespace loclab::indicators {

using Complex = std::complex<double>;

/// Variance and minimizing center of a distribution on the discrete circle,
/// in angle units (site j sits at angle 2 pi j / N).
struct CircularVariance {
  double variance = 0.0;  // radians^2, <= pi^2
  double center = 0.0;    // [0, 2 pi)
  bool degenerate_center = false;
};

/// Exact Riemannian-center variance by cut enumeration: every branch cut
/// unwraps the circle to a segment whose Euclidean mean is a candidate
/// center; a candidate counts when its mean is consistent with its own cut
/// window. Ties go to the smallest center angle; the degenerate flag is set
/// when the objective varies by less than 1e-12 across valid candidates.
inline CircularVariance frechet_variance(const Eigen::VectorXd& g) {
  const int n = static_cast<int>(g.size());
  if (n < 1) throw std::invalid_argument("frechet_variance: empty distribution");
  if (g.minCoeff() < -1e-12 || std::abs(g.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("frechet_variance: input must be a normalized distribution");

  const double half = 0.5 * n;
  const double slack = 1e-9 * n;
  struct Candidate {
    double objective;  // site units
    double center;     // [0, N)
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n);

  for (int cut = 0; cut < n; ++cut) {
    // Window [cut, cut + N): sites below the cut move up one period.
    double mean = 0.0;
    for (int x = 0; x < n; ++x) mean += g(x) * (x < cut ? x + n : x);
    bool valid = true;
    double f = 0.0;
    for (int x = 0; x < n; ++x) {
      const double y = (x < cut ? x + n : x) - mean;
      if (g(x) > 0.0 && std::abs(y) > half + slack) {
        valid = false;
        break;
      }
      f += g(x) * y * y;
    }
    if (!valid) continue;
    double center = std::fmod(mean, static_cast<double>(n));
    if (center < 0.0) center += n;
    candidates.push_back({f, center});
  }
  if (candidates.empty())
    throw std::runtime_error("frechet_variance: no consistent branch cut found");

  const double to_angle2 = std::pow(2.0 * M_PI / n, 2);
  double fmin = candidates.front().objective, fmax = fmin;
  for (const auto& c : candidates) {
    fmin = std::min(fmin, c.objective);
    fmax = std::max(fmax, c.objective);
  }
  const double tie_window = 1e-12 / to_angle2;  // 1e-12 in angle units
  double center = std::numeric_limits<double>::infinity();
  double spread = 0.0;  // how far tied centers sit from the chosen one
  for (const auto& c : candidates)
    if (c.objective <= fmin + tie_window) center = std::min(center, c.center);
  for (const auto& c : candidates)
    if (c.objective <= fmin + tie_window)
      spread = std::max(spread, std::min(std::abs(c.center - center),
                                         n - std::abs(c.center - center)));

  CircularVariance out;
  out.variance = fmin * to_angle2;
  out.center = center * (2.0 * M_PI / n);
  // Degenerate: a flat objective across materially distinct centers.
  out.degenerate_center = (fmax - fmin) * to_angle2 < 1e-12 && spread > 0.5;
  return out;
}

struct LtObcResult {
  double operator_path = 0.0;    // (1/N) sum_mn x_m x_n C_mn
  double covariance_path = 0.0;  // (M^2/N) Cov[X1, X2] from the bivariate law
  double value() const { return operator_path; }
};

/// Position spread per particle for open-boundary data, evaluated through
/// the position-operator cumulant and through the bivariate covariance.
/// The two routes are one algebraic identity; both center the coordinates
/// at the density mean (exact: the cross terms cancel by number
/// conservation), which keeps the large-N cancellation benign.
inline LtObcResult lt_obc(const freefermion::CorrelationData& cd) {
  const int n = cd.n_sites;
  const int m = cd.n_particles;
  if (m < 1) throw std::invalid_argument("lt_obc: particle count missing");

  Eigen::VectorXd xc(n);
  for (int i = 0; i < n; ++i) xc(i) = site_position(i);
  const double center = xc.dot(cd.density) / static_cast<double>(m);
  xc.array() -= center;

  LtObcResult r;
  r.operator_path = xc.dot(cd.c * xc) / static_cast<double>(n);

  const double m2 = static_cast<double>(m) * m;
  const Eigen::MatrixXd f = cd.nn() / m2;  // bivariate law of (X1, X2)
  const double e_xx = xc.dot(f * xc);
  const double e_x1 = f.rowwise().sum().dot(xc);
  const double e_x2 = f.colwise().sum().dot(xc);
  r.covariance_path = (e_xx - e_x1 * e_x2) * m2 / static_cast<double>(n);

  const double mismatch = std::abs(r.operator_path - r.covariance_path);
  if (mismatch > 1e-9 * std::max(1.0, std::abs(r.operator_path))) {
    std::ostringstream msg;
    msg << "lt_obc: operator and covariance paths disagree by " << mismatch;
    throw std::runtime_error(msg.str());
  }
  return r;
}

/// Raw second cumulant <Q^dag Q> - |<Q>|^2 of the phase position operator
/// Q = sum_m q(m) n_m, q(m) = (N / 2 pi i)(e^{2 pi i m / N} - 1) with
/// 1-based m. Stored unscaled; the free-fermion reference normalizes it.
inline double lt_resta(const freefermion::CorrelationData& cd) {
  const int n = cd.n_sites;
  Eigen::VectorXcd q(n);
  const double scale = n / (2.0 * M_PI);
  for (int i = 0; i < n; ++i) {
    const double phi = momentum_angle((i + 1) % n, n);
    // (e^{i phi} - 1) / i = sin(phi) + i (1 - cos(phi))
    q(i) = scale * Complex(std::sin(phi), 1.0 - std::cos(phi));
  }
  Eigen::VectorXcd v(n);
  v.real() = cd.c * q.real();
  v.imag() = cd.c * q.imag();
  return q.real().dot(v.real()) + q.imag().dot(v.imag());
}

/// Variance combination Var[X1] + Var[X2] - Var[X1 - X2] in angle units,
/// raw (unnormalized). The Riemannian center of the marginal fixes one
/// branch cut for both coordinates; inside that window the marginal
/// Fréchet variances coincide with the Euclidean ones and the difference
/// variance is taken over the unwrapped difference, so the combination
/// equals twice the covariance of the unwrapped coordinates exactly.
/// (Re-wrapping the difference modulo N would break that identity and
/// the combination would no longer track the position spread.)
inline double lt_riemann(const correlations::JointDistribution& f) {
  const int n = f.n_sites;
  const Eigen::VectorXd marginal_x2 = f.table.colwise().sum();
  const CircularVariance v1 = frechet_variance(f.marginal);

  // Both coordinates unwrap into the window around the marginal's center
  // (the marginals coincide for a symmetric table).
  const double center_site = v1.center * n / (2.0 * M_PI);
  Eigen::VectorXd y(n);
  for (int x = 0; x < n; ++x) {
    double d = x - center_site;
    d -= n * std::floor(d / n + 0.5);  // (-N/2, N/2]
    y(x) = d;
  }

  const double e1 = f.marginal.dot(y);
  const double e2 = marginal_x2.dot(y);
  const double var1 = f.marginal.dot(y.cwiseAbs2().matrix()) - e1 * e1;
  const double var2 = marginal_x2.dot(y.cwiseAbs2().matrix()) - e2 * e2;
  const double e_xx = y.dot(f.table * y);
  const double e_d2 = (var1 + e1 * e1) + (var2 + e2 * e2) - 2.0 * e_xx;
  const double var_d = e_d2 - (e1 - e2) * (e1 - e2);

  const double to_angle2 = std::pow(2.0 * M_PI / n, 2);
  return (var1 + var2 - var_d) * to_angle2;
}

/// I = sum f log(f / (f1 f2)), natural log, 0 log 0 := 0.
inline double mutual_information(const correlations::JointDistribution& f) {
  const int n = f.n_sites;
  if (std::abs(f.table.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("mutual_information: f must be normalized");
  const Eigen::VectorXd f1 = f.table.rowwise().sum();
  const Eigen::VectorXd f2 = f.table.colwise().sum();
  double info = 0.0;
  for (int a = 0; a < n; ++a) {
    if (f1(a) <= 0.0) continue;
    for (int b = 0; b < n; ++b) {
      const double p = f.table(a, b);
      if (p <= 0.0 || f2(b) <= 0.0) continue;
      info += p * std::log(p / (f1(a) * f2(b)));
    }
  }
  if (info < -1e-12)
    throw std::runtime_error("mutual_information: negative value " + std::to_string(info));
  return std::max(info, 0.0);
}

/// Forward-difference slope of C~(p) at p = 0 in angle units:
/// 2 pi (C~_1 - C~_0) / (2 pi / N) = N (C~_1 - C~_0). Equals 1 for free
/// fermions at half filling, which makes the indicator self-normalized.
inline double lt_locfunc(const correlations::StructureFactor& sf) {
  if (sf.n_sites < 2 || sf.diagonal.size() < 2)
    throw std::invalid_argument("lt_locfunc: need the diagonal for N >= 2");
  return sf.n_sites * (sf.diagonal(1) - sf.diagonal(0));
}

struct RawIndicators {
  double r = 0.0;
  double rc = 0.0;
  double mi = 0.0;
  double lf = 0.0;
};

struct IndicatorValue {
  double raw = 0.0;
  double normalized = 0.0;
};

struct IndicatorReport {
  IndicatorValue r, rc, mi, lf;
  RawIndicators reference;  // free-point raw values used for normalization
  int n_sites = 0;
  int n_particles = 0;
  std::string model;  // model parameters of the evaluated point
  double delta = 0.0;
  double v = 0.0;
};

/// Divide each raw indicator by its value at the free point computed at
/// identical (N, M, boundary); every normalized indicator is 1 there.
inline IndicatorReport normalize(const RawIndicators& raw, const RawIndicators& reference,
                                 int n_sites, int n_particles) {
  auto make = [](double value, double ref, const char* name) {
    if (!(ref > 0.0))
      throw std::invalid_argument(std::string("normalize: reference for ") + name +
                                  " must be positive");
    return IndicatorValue{value, value / ref};
  };
  IndicatorReport report;
  report.r = make(raw.r, reference.r, "lambda_r");
  report.rc = make(raw.rc, reference.rc, "lambda_rc");
  report.mi = make(raw.mi, reference.mi, "lambda_mi");
  report.lf = make(raw.lf, reference.lf, "lambda_lf");
  report.reference = reference;
  report.n_sites = n_sites;
  report.n_particles = n_particles;
  return report;
}

}  // namespace loclab::indicators
