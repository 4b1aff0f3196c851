#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "loclab/lattice.hpp"

namespace loclab::models {

struct ModelParams {
  double j = 1.0;      // hopping strength
  double delta = 0.0;  // dimerization / potential strength
  double beta = 0.0;   // quasiperiodic wave number (0 for SSH)
  double phase = 0.0;  // potential phase offset
};

/// Quadratic lattice Hamiltonian: an exactly Hermitian N x N matrix.
struct SingleParticleHamiltonian {
  int n_sites = 0;
  Boundary boundary = Boundary::periodic;
  Eigen::MatrixXcd matrix;
  ModelParams params;
};

/// Dimerized chain: hopping -t_i between sites i and i+1 with
/// t_i = 1 - delta*(-1)^i (1-based i), wrap bond -t_N for periodic chains.
inline SingleParticleHamiltonian build_ssh(int n, double delta, Boundary boundary) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("build_ssh: N must be even and >= 2");
  if (delta < 0.0 || delta > 1.0)
    throw std::invalid_argument("build_ssh: delta must lie in [0, 1]");

  SingleParticleHamiltonian h;
  h.n_sites = n;
  h.boundary = boundary;
  h.params.delta = delta;
  h.matrix = Eigen::MatrixXcd::Zero(n, n);
  auto hop = [&](int i) {  // t_i for 1-based bond index i
    return 1.0 - delta * ((i % 2 == 0) ? 1.0 : -1.0);
  };
  for (int i = 1; i <= n - 1; ++i) {
    h.matrix(i - 1, i) = -hop(i);
    h.matrix(i, i - 1) = -hop(i);
  }
  if (boundary == Boundary::periodic && n > 2) {
    h.matrix(n - 1, 0) += -hop(n);
    h.matrix(0, n - 1) += -hop(n);
  } else if (boundary == Boundary::periodic && n == 2) {
    // N=2 ring: the wrap bond coincides with the (1,2) bond.
    h.matrix(0, 1) += -hop(2);
    h.matrix(1, 0) += -hop(2);
  }
  return h;
}

/// Quasiperiodic chain: hopping +J between neighbours and on-site potential
/// delta*cos(2*pi*beta*i + phase) at 1-based site i.
inline SingleParticleHamiltonian build_aa_single(int n, double j, double delta, double beta,
                                                 double phase, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("build_aa_single: N must be >= 2");
  if (delta < 0.0) throw std::invalid_argument("build_aa_single: delta must be >= 0");

  SingleParticleHamiltonian h;
  h.n_sites = n;
  h.boundary = boundary;
  h.params = ModelParams{j, delta, beta, phase};
  h.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    h.matrix(i, i + 1) = j;
    h.matrix(i + 1, i) = j;
  }
  if (boundary == Boundary::periodic && n > 2) {
    h.matrix(n - 1, 0) += j;
    h.matrix(0, n - 1) += j;
  } else if (boundary == Boundary::periodic && n == 2) {
    h.matrix(0, 1) += j;
    h.matrix(1, 0) += j;
  }
  for (int i = 1; i <= n; ++i)
    h.matrix(i - 1, i - 1) = delta * std::cos(2.0 * M_PI * beta * i + phase);
  return h;
}

struct ManyBodyHamiltonianSpec {
  LatticeSpec lattice;
  double j = 1.0;
  double delta = 0.0;
  double beta = 0.0;
  double phase = 0.0;
  double v = 0.0;                // nearest-neighbour density-density strength
  bool wrap_interaction = true;  // include the (N,1) V term on periodic chains
};

/// amplitude * a_i^dag a_j + h.c.; i == j encodes an on-site term (amplitude real).
struct QuadraticTerm {
  int i = 0;
  int j = 0;
  std::complex<double> amplitude;
};

/// v * n_i n_j.
struct DensityDensityTerm {
  int i = 0;
  int j = 0;
  double v = 0.0;
};

/// Second-quantized operator description, site indices 0-based.
struct ManyBodyTerms {
  int n_sites = 0;
  std::vector<QuadraticTerm> quadratic;
  std::vector<DensityDensityTerm> density_density;
};

inline ManyBodyTerms build_aa_manybody(const ManyBodyHamiltonianSpec& spec) {
  spec.lattice.validate();
  const int n = spec.lattice.n_sites;
  ManyBodyTerms terms;
  terms.n_sites = n;
  const int bonds = (spec.lattice.boundary == Boundary::periodic) ? n : n - 1;
  for (int i = 0; i < bonds; ++i)
    terms.quadratic.push_back({i, (i + 1) % n, spec.j});
  for (int i = 1; i <= n; ++i) {
    const double eps = spec.delta * std::cos(2.0 * M_PI * spec.beta * i + spec.phase);
    if (eps != 0.0) terms.quadratic.push_back({i - 1, i - 1, eps});
  }
  if (spec.v != 0.0) {
    const int vbonds =
        (spec.lattice.boundary == Boundary::periodic && spec.wrap_interaction) ? n : n - 1;
    for (int i = 0; i < vbonds; ++i)
      terms.density_density.push_back({i, (i + 1) % n, spec.v});
  }
  return terms;
}

/// Term list for an arbitrary quadratic Hamiltonian sum_{mn} h_mn a_m^dag a_n.
inline ManyBodyTerms terms_from_quadratic(const Eigen::MatrixXcd& h) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n) throw std::invalid_argument("terms_from_quadratic: square matrix required");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("terms_from_quadratic: matrix must be Hermitian");
  ManyBodyTerms terms;
  terms.n_sites = n;
  for (int i = 0; i < n; ++i) {
    if (h(i, i) != std::complex<double>(0.0, 0.0)) terms.quadratic.push_back({i, i, h(i, i).real()});
    for (int jj = i + 1; jj < n; ++jj)
      if (h(i, jj) != std::complex<double>(0.0, 0.0)) terms.quadratic.push_back({i, jj, h(i, jj)});
  }
  return terms;
}

}  // namespace loclab::models
