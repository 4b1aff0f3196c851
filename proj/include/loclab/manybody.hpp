#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "loclab/freefermion.hpp"
#include "loclab/models.hpp"

namespace loclab::manybody {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Fixed-particle-number occupation basis: N-bit masks with popcount M,
/// strictly ascending as integers.
struct FockBasis {
  int n_sites = 0;
  int n_particles = 0;
  std::vector<std::uint32_t> states;

  std::size_t size() const { return states.size(); }

  /// Ordinal of a mask (the masks are sorted).
  std::size_t index_of(std::uint32_t mask) const {
    const auto it = std::lower_bound(states.begin(), states.end(), mask);
    if (it == states.end() || *it != mask)
      throw std::invalid_argument("FockBasis: mask not in basis");
    return static_cast<std::size_t>(it - states.begin());
  }
};

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

inline FockBasis build_basis(int n, int m) {
  if (n < 1 || n > 24) throw std::invalid_argument("build_basis: need 1 <= N <= 24");
  if (m < 1 || m > n) throw std::invalid_argument("build_basis: need 0 < M <= N");
  const std::uint64_t dim = binomial(n, m);
  if (dim > 5'000'000ULL)
    throw std::invalid_argument("build_basis: dimension " + std::to_string(dim) +
                                " exceeds the 5e6 guard");
  FockBasis basis;
  basis.n_sites = n;
  basis.n_particles = m;
  basis.states.reserve(dim);
  // Gosper's hack enumerates masks in ascending order.
  std::uint32_t mask = (1u << m) - 1u;
  const std::uint32_t limit = 1u << n;
  while (mask < limit) {
    basis.states.push_back(mask);
    const std::uint32_t c = mask & (~mask + 1u);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
    if (c == 0) break;
  }
  return basis;
}

/// Matrix of the term list in the occupation basis. Creation operators are
/// site-ascending; a hop between i and j picks up the parity of the occupied
/// sites strictly between them (the periodic wrap follows from the same rule).
inline SparseMatrix assemble(const models::ManyBodyTerms& terms, const FockBasis& basis) {
  const int n = basis.n_sites;
  if (terms.n_sites != n)
    throw std::invalid_argument("assemble: term list and basis disagree on N");
  for (const auto& t : terms.quadratic)
    if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
      throw std::invalid_argument("assemble: quadratic term site out of range");
  for (const auto& t : terms.density_density)
    if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
      throw std::invalid_argument("assemble: density term site out of range");

  const auto dim = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(basis.size() * (terms.quadratic.size() + 1));

  auto between_mask = [](int a, int b) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    std::uint32_t m = 0;
    for (int s = lo + 1; s < hi; ++s) m |= 1u << s;
    return m;
  };

  for (std::size_t s = 0; s < basis.size(); ++s) {
    const std::uint32_t src = basis.states[s];
    double diag = 0.0;
    for (const auto& t : terms.quadratic) {
      if (t.i == t.j) {
        if (src & (1u << t.i)) diag += t.amplitude.real();
        continue;
      }
      // amplitude * a_i^dag a_j moves a particle j -> i.
      if ((src & (1u << t.j)) && !(src & (1u << t.i))) {
        const std::uint32_t dst = (src & ~(1u << t.j)) | (1u << t.i);
        const double sign =
            (std::popcount(src & between_mask(t.i, t.j)) % 2 == 0) ? 1.0 : -1.0;
        const auto d = static_cast<Eigen::Index>(basis.index_of(dst));
        triplets.emplace_back(d, static_cast<Eigen::Index>(s), sign * t.amplitude);
        triplets.emplace_back(static_cast<Eigen::Index>(s), d, sign * std::conj(t.amplitude));
      }
    }
    for (const auto& t : terms.density_density)
      if ((src & (1u << t.i)) && (src & (1u << t.j))) diag += t.v;
    if (diag != 0.0)
      triplets.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s),
                            Complex(diag, 0.0));
  }

  SparseMatrix h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();

  SparseMatrix diff = SparseMatrix(h.adjoint()) - h;
  double herm = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
      herm = std::max(herm, std::abs(it.value()));
  if (herm != 0.0)
    throw std::runtime_error("assemble: non-Hermitian assembly (residual " +
                             std::to_string(herm) + ")");
  return h;
}

struct SolverDiagnostics {
  std::string method;         // "dense" or "lanczos"
  int iterations = 0;
  double residual = 0.0;      // ||Hv - Ev||
  double energy_gap = 0.0;    // E1 - E0 estimate
  bool monotone = true;       // Ritz values never increased
};

struct ManyBodyState {
  FockBasis basis;
  Eigen::VectorXcd amplitudes;
  double energy = 0.0;
  bool degenerate_ground = false;
  SolverDiagnostics diagnostics;
};

namespace detail {

inline void fix_global_phase(Eigen::VectorXcd& v) {
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = v(imax);
  if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
}

inline Eigen::VectorXcd start_vector(Eigen::Index dim) {
  // Deterministic: constant vector plus fixed-seed jitter, normalized.
  std::mt19937 rng(0x10c1abu);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(1.0 + 0.01 * u(rng), 0.0);
  v.normalize();
  return v;
}

}  // namespace detail

/// Lowest eigenpair by full diagonalization. Dimension guard 4000.
inline ManyBodyState ground_state_dense(const SparseMatrix& h, const FockBasis& basis,
                                        std::optional<Eigen::VectorXcd> previous = {}) {
  const Eigen::Index dim = h.rows();
  if (dim > 4000)
    throw std::invalid_argument("ground_state_dense: dimension exceeds the 4000 dense guard");
  ManyBodyState state;
  state.basis = basis;
  state.diagnostics.method = "dense";

  Eigen::MatrixXcd dense(h);
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  if (dense.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense.real());
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("ground_state_dense: eigensolver failed");
    evals = solver.eigenvalues();
    evecs = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("ground_state_dense: eigensolver failed");
    evals = solver.eigenvalues();
    evecs = solver.eigenvectors();
  }

  state.energy = evals(0);
  state.diagnostics.energy_gap = dim > 1 ? evals(1) - evals(0) : 0.0;
  state.degenerate_ground = dim > 1 && state.diagnostics.energy_gap < 1e-10;
  int pick = 0;
  if (state.degenerate_ground && previous) {
    double best = -1.0;
    for (int k = 0; k < dim && evals(k) - evals(0) < 1e-10; ++k) {
      const double overlap = std::abs(previous->dot(evecs.col(k)));
      if (overlap > best) {
        best = overlap;
        pick = k;
      }
    }
  }
  state.amplitudes = evecs.col(pick);
  detail::fix_global_phase(state.amplitudes);
  state.diagnostics.residual = (h * state.amplitudes - state.energy * state.amplitudes).norm();
  return state;
}

/// Lanczos with full reorthogonalization; residual target on ||Hv - Ev||.
inline ManyBodyState ground_state_lanczos(const SparseMatrix& h, const FockBasis& basis,
                                          double tol = 1e-9, int max_iter = 600,
                                          std::optional<Eigen::VectorXcd> previous = {}) {
  const Eigen::Index dim = h.rows();
  ManyBodyState state;
  state.basis = basis;
  state.diagnostics.method = "lanczos";
  if (dim == 1) {
    state.energy = h.coeff(0, 0).real();
    state.amplitudes = Eigen::VectorXcd::Ones(1);
    return state;
  }

  std::vector<Eigen::VectorXcd> v;
  v.push_back(previous && previous->size() == dim ? previous->normalized()
                                                  : detail::start_vector(dim));
  std::vector<double> alpha, beta;
  double last_ritz = std::numeric_limits<double>::infinity();
  Eigen::VectorXd ritz_vals;
  Eigen::MatrixXd ritz_vecs;

  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = h * v.back();
    if (it > 0) w -= beta.back() * v[v.size() - 2];
    alpha.push_back(v.back().dot(w).real());
    w -= alpha.back() * v.back();
    for (int pass = 0; pass < 2; ++pass)  // full reorthogonalization
      for (const auto& q : v) w -= q.dot(w) * q;
    const double b = w.norm();

    const int j = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(j, j);
    for (int i = 0; i < j; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < j) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri_solver(tri);
    ritz_vals = tri_solver.eigenvalues();
    ritz_vecs = tri_solver.eigenvectors();
    if (ritz_vals(0) > last_ritz + 1e-12) state.diagnostics.monotone = false;
    last_ritz = ritz_vals(0);
    state.diagnostics.iterations = j;

    const double bound = b * std::abs(ritz_vecs(j - 1, 0));
    if (bound <= 0.1 * tol * std::max(1.0, std::abs(ritz_vals(0))) || b < 1e-14 ||
        it == max_iter - 1) {
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
      for (int i = 0; i < j; ++i) x += ritz_vecs(i, 0) * v[i];
      x.normalize();
      const double energy = ritz_vals(0);
      const double residual = (h * x - energy * x).norm();
      if (residual <= tol || b < 1e-14 || it == max_iter - 1) {
        if (residual > tol) {
          std::ostringstream msg;
          msg << "ground_state_lanczos: no convergence after " << j
              << " iterations (residual " << residual << ", target " << tol << ")";
          throw std::runtime_error(msg.str());
        }
        state.energy = energy;
        state.diagnostics.residual = residual;
        state.diagnostics.energy_gap = j > 1 ? ritz_vals(1) - ritz_vals(0) : 0.0;
        state.degenerate_ground = j > 1 && state.diagnostics.energy_gap < 1e-10;
        if (state.degenerate_ground && previous) {
          Eigen::VectorXcd x2 = Eigen::VectorXcd::Zero(dim);
          for (int i = 0; i < j; ++i) x2 += ritz_vecs(i, 1) * v[i];
          x2.normalize();
          if (std::abs(previous->dot(x2)) > std::abs(previous->dot(x))) x = x2;
        }
        detail::fix_global_phase(x);
        state.amplitudes = x;
        return state;
      }
    }
    beta.push_back(b);
    v.push_back(w / b);
  }
  throw std::runtime_error("ground_state_lanczos: iteration budget exhausted");
}

/// Lowest eigenpair; dense solve up to dimension 4000, Lanczos above.
inline ManyBodyState ground_state(const SparseMatrix& h, const FockBasis& basis,
                                  double tol = 1e-9,
                                  std::optional<Eigen::VectorXcd> previous = {},
                                  Eigen::Index dense_threshold = 4000) {
  if (h.rows() < 1) throw std::invalid_argument("ground_state: empty matrix");
  return h.rows() <= dense_threshold ? ground_state_dense(h, basis, previous)
                                     : ground_state_lanczos(h, basis, tol, 600, previous);
}

/// Site occupations are diagonal in this basis, so
/// <n_m n_n> = sum_s |amp_s|^2 bit_m(s) bit_n(s).
inline freefermion::CorrelationData density_density_mb(const ManyBodyState& state) {
  const double norm = state.amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("density_density_mb: state must be normalized");
  const int n = state.basis.n_sites;

  freefermion::CorrelationData cd;
  cd.n_sites = n;
  cd.n_particles = state.basis.n_particles;
  cd.has_g = false;
  cd.density = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd nn = Eigen::MatrixXd::Zero(n, n);

  std::vector<int> bits;
  bits.reserve(n);
  for (std::size_t s = 0; s < state.basis.size(); ++s) {
    const double w = std::norm(state.amplitudes(static_cast<Eigen::Index>(s)));
    if (w == 0.0) continue;
    const std::uint32_t mask = state.basis.states[s];
    bits.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) bits.push_back(i);
    for (const int a : bits) {
      cd.density(a) += w;
      for (const int b : bits) nn(a, b) += w;
    }
  }
  cd.c = nn - cd.density * cd.density.transpose();
  cd.c = 0.5 * (cd.c + cd.c.transpose()).eval();
  return cd;
}

}  // namespace loclab::manybody
