#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "loclab/freefermion.hpp"
#include "loclab/lattice.hpp"

namespace loclab::correlations {

using Complex = std::complex<double>;

/// Bivariate site distribution f(x1, x2) = <n_{x1} n_{x2}> / M^2.
struct JointDistribution {
  int n_sites = 0;
  Eigen::MatrixXd table;
  Eigen::VectorXd marginal;  // row sums; equals <n_x>/M
};

/// Momentum-space correlator. `diagonal` holds the real values
/// C~_p = C~_pp for p = 0..N-1; the full matrix is opt-in.
struct StructureFactor {
  int n_sites = 0;
  Eigen::VectorXd diagonal;
  std::optional<Eigen::MatrixXcd> full;

  double angle(int p) const { return momentum_angle(p, n_sites); }
};

inline JointDistribution joint_distribution(const freefermion::CorrelationData& cd,
                                            int m_particles) {
  if (m_particles < 1) throw std::invalid_argument("joint_distribution: M must be positive");
  JointDistribution f;
  f.n_sites = cd.n_sites;
  f.table = cd.nn() / (static_cast<double>(m_particles) * m_particles);

  const double worst = f.table.minCoeff();
  if (worst < -1e-12) {
    std::ostringstream msg;
    msg << "joint_distribution: table entry " << worst
        << " below -1e-12 signals an upstream correlator bug";
    throw std::runtime_error(msg.str());
  }
  if (worst < 0.0) {
    f.table = f.table.cwiseMax(0.0);
    f.table /= f.table.sum();
  }
  f.marginal = f.table.rowwise().sum();
  return f;
}

/// C~_pq = (1/N) sum_{m,n} e^{(2 pi i / N)(n q - m p)} C_mn with 1-based
/// site coordinates. Diagonal always computed; full matrix on request.
inline StructureFactor structure_factor(const freefermion::CorrelationData& cd,
                                        bool full = false) {
  const int n = cd.n_sites;
  const double rowsum = cd.c.rowwise().sum().cwiseAbs().maxCoeff();
  if (rowsum > 1e-8)
    throw std::invalid_argument("structure_factor: C row sums must vanish (got " +
                                std::to_string(rowsum) + ")");

  Eigen::MatrixXcd kernel(n, n);  // kernel(m, p) = e^{2 pi i (m+1) p / N}
  for (int m = 0; m < n; ++m)
    for (int p = 0; p < n; ++p)
      kernel(m, p) = std::exp(Complex(0.0, momentum_angle(static_cast<int>(
                                               (static_cast<long long>(m + 1) * p) % n),
                                           n)));

  StructureFactor sf;
  sf.n_sites = n;
  Eigen::MatrixXcd cu(n, n);
  cu.real() = cd.c * kernel.real();
  cu.imag() = cd.c * kernel.imag();
  if (full) {
    sf.full = (kernel.adjoint() * cu) / static_cast<double>(n);
    sf.diagonal = sf.full->diagonal().real();
  } else {
    sf.diagonal.resize(n);
    for (int p = 0; p < n; ++p)
      sf.diagonal(p) = (kernel.col(p).dot(cu.col(p))).real() / static_cast<double>(n);
  }
  return sf;
}

/// Circular law of D = X1 - X2 (mod N): g(d) = sum_x f((x+d) mod N, x).
inline Eigen::VectorXd difference_distribution(const JointDistribution& f) {
  const int n = f.n_sites;
  const double total = f.table.sum();
  if (std::abs(total - 1.0) > 1e-8)
    throw std::invalid_argument("difference_distribution: f must be normalized");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int d = 0; d < n; ++d)
    for (int x = 0; x < n; ++x) g(d) += f.table((x + d) % n, x);
  return g;
}

/// Raw second cumulant of the phase position operator reconstructed from
/// four structure-factor entries: (N^3 / 4 pi^2)(C~_11 - C~_01 - C~_10 + C~_00).
inline double lt_structure_identity(const StructureFactor& sf) {
  if (!sf.full) throw std::invalid_argument("lt_structure_identity: full C~_pq required");
  const auto& c = *sf.full;
  const double n = sf.n_sites;
  const Complex combo = c(1, 1) - c(0, 1) - c(1, 0) + c(0, 0);
  return combo.real() * n * n * n / (4.0 * M_PI * M_PI);
}

}  // namespace loclab::correlations
