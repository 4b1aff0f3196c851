#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "loclab/freefermion.hpp"
#include "loclab/indicators.hpp"
#include "loclab/lattice.hpp"
#include "loclab/manybody.hpp"
#include "loclab/models.hpp"

namespace loclab::oracle {

using Complex = std::complex<double>;

struct OracleReport {
  std::string name;
  double max_abs_deviation = 0.0;
  int instance_count = 0;
  int skipped = 0;
  unsigned seed = 0;
  std::string worst_instance;
  double threshold = 0.0;
  bool passed() const { return max_abs_deviation <= threshold; }
};

/// Random Hermitian hopping matrix; bandwidth 0 means dense.
inline Eigen::MatrixXcd random_hermitian(int n, std::mt19937& rng, int bandwidth = 0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = gauss(rng);
    for (int j = i + 1; j < n; ++j) {
      if (bandwidth > 0 && j - i > bandwidth) continue;
      const Complex z(gauss(rng), gauss(rng));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

/// Wick path vs many-body exact diagonalization for one quadratic
/// Hamiltonian; returns the max |<nn>| deviation, or nothing when the
/// Fermi level is degenerate (the comparison needs a unique filling).
inline std::optional<double> wick_vs_ed_once(const Eigen::MatrixXcd& h, int m) {
  const int n = static_cast<int>(h.rows());
  models::SingleParticleHamiltonian sp;
  sp.n_sites = n;
  sp.matrix = h;
  const auto orb = freefermion::diagonalize(sp, m);
  const double scale = std::max(1.0, orb.energies.cwiseAbs().maxCoeff());
  if (m < n && orb.energies(m) - orb.energies(m - 1) < 1e-10 * scale) return std::nullopt;
  const auto wick = freefermion::correlations_from_fermi_sea(orb);

  const auto basis = manybody::build_basis(n, m);
  const auto hm = manybody::assemble(models::terms_from_quadratic(h), basis);
  const auto gs = manybody::ground_state_dense(hm, basis);
  const auto ed = manybody::density_density_mb(gs);
  return (wick.nn() - ed.nn()).cwiseAbs().maxCoeff();
}

/// Checks the Wick factorization against many-body exact diagonalization
/// over random Hermitian instances; degenerate draws are skipped and counted.
inline OracleReport ed_free_check(int n, int m, int instances, unsigned seed = 0x51dbeefu,
                                  int bandwidth = 0) {
  if (n > 10) throw std::invalid_argument("ed_free_check: N <= 10 guard");
  if (m < 1 || m > n) throw std::invalid_argument("ed_free_check: need 0 < M <= N");

  OracleReport report;
  report.name = "wick_vs_many_body_ed";
  report.seed = seed;
  report.threshold = 1e-10;
  std::mt19937 rng(seed);

  for (int inst = 0; inst < instances; ++inst) {
    const Eigen::MatrixXcd h = random_hermitian(n, rng, bandwidth);
    const auto dev = wick_vs_ed_once(h, m);
    if (!dev) {
      ++report.skipped;
      continue;
    }
    ++report.instance_count;
    if (*dev > report.max_abs_deviation) {
      report.max_abs_deviation = *dev;
      std::ostringstream w;
      w << "instance " << inst << " (N=" << n << ", M=" << m << ", seed=" << seed << ")";
      report.worst_instance = w.str();
    }
  }
  return report;
}

/// Literal double-sum structure factor, O(N^4); 1-based site coordinates.
inline Eigen::MatrixXcd structure_factor_naive(const freefermion::CorrelationData& cd) {
  const int n = cd.n_sites;
  if (n > 32) throw std::invalid_argument("structure_factor_naive: N <= 32 guard");
  Eigen::MatrixXcd out(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      Complex acc(0.0, 0.0);
      for (int m = 1; m <= n; ++m)
        for (int nu = 1; nu <= n; ++nu)
          acc += std::exp(Complex(0.0, 2.0 * M_PI / n * (nu * q - m * p))) * cd.c(m - 1, nu - 1);
      out(p, q) = acc / static_cast<double>(n);
    }
  return out;
}

/// Fréchet variance by brute-force scan over a uniform grid of candidate
/// centers; an upper bound on the exact cut-enumeration minimum.
inline indicators::CircularVariance frechet_grid(const Eigen::VectorXd& g, int resolution) {
  const int n = static_cast<int>(g.size());
  if (resolution < 10 * n)
    throw std::invalid_argument("frechet_grid: resolution must be at least 10 N");
  double best = std::numeric_limits<double>::infinity();
  double best_center = 0.0;
  for (int j = 0; j < resolution; ++j) {
    const double c = static_cast<double>(j) * n / resolution;
    double f = 0.0;
    for (int x = 0; x < n; ++x) {
      double d = std::abs(x - c);
      d = std::min(d, n - d);
      f += g(x) * d * d;
    }
    if (f < best) {
      best = f;
      best_center = c;
    }
  }
  const double to_angle2 = std::pow(2.0 * M_PI / n, 2);
  indicators::CircularVariance out;
  out.variance = best * to_angle2;
  out.center = best_center * 2.0 * M_PI / n;
  return out;
}

/// Exact decoupled-dimer chain quantities (the delta = 1 limit): each odd
/// bond hosts one fermion in its bonding orbital, so per dimer
/// C_mm = 1/4, C_intra = -1/4 and C~_p = (1 - cos(2 pi p / N)) / 4.
struct DimerClosedForm {
  int n_sites = 0;
  Eigen::MatrixXd c;          // chain correlator assembled from dimer blocks
  Eigen::VectorXd diagonal;   // C~_p, p = 0..N-1
  double lambda_lf = 0.0;     // N (C~_1 - C~_0)
  double lambda_resta = 0.0;  // raw cumulant (N^3 / 4 pi^2) C~_1
};

inline DimerClosedForm dimer_closed_form(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("dimer_closed_form: N must be even");
  DimerClosedForm out;
  out.n_sites = n;
  out.c = Eigen::MatrixXd::Zero(n, n);
  for (int d = 0; d < n / 2; ++d) {
    const int a = 2 * d, b = 2 * d + 1;
    out.c(a, a) = out.c(b, b) = 0.25;
    out.c(a, b) = out.c(b, a) = -0.25;
  }
  out.diagonal.resize(n);
  for (int p = 0; p < n; ++p)
    out.diagonal(p) = 0.25 * (1.0 - std::cos(momentum_angle(p, n)));
  out.lambda_lf = n * (out.diagonal(1) - out.diagonal(0));
  out.lambda_resta = out.diagonal(1) * std::pow(static_cast<double>(n), 3) / (4.0 * M_PI * M_PI);
  return out;
}

}  // namespace loclab::oracle
