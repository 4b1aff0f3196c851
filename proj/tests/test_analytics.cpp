#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "loclab/analytics.hpp"
#include "loclab/freefermion.hpp"
#include "loclab/models.hpp"
#include "loclab/sweep.hpp"

using namespace loclab;

TEST(SshLocfuncLimit, VanishesAtZeroMomentum) {
  for (const double delta : {0.0, 0.3, 1.0})
    EXPECT_NEAR(analytics::ssh_locfunc_limit(0.0, delta), 0.0, 1e-9) << "delta=" << delta;
}

TEST(SshLocfuncLimit, PlateauAtPi) {
  for (const double delta : {0.01, 0.1, 0.5, 1.0})
    EXPECT_NEAR(analytics::ssh_locfunc_limit(M_PI, delta), 0.5, 1e-9) << "delta=" << delta;
}

TEST(SshLocfuncLimit, GaplessLineIsLinear) {
  for (const double p : {0.3, 1.0, 2.5})
    EXPECT_NEAR(analytics::ssh_locfunc_limit(p, 0.0), p / (2.0 * M_PI), 1e-9) << "p=" << p;
}

TEST(SshLocfuncLimit, EvenInDimerization) {
  for (const double p : {0.5, 2.0})
    EXPECT_EQ(analytics::ssh_locfunc_limit(p, 0.4), analytics::ssh_locfunc_limit(p, -0.4));
}

TEST(SshLocfuncLimit, FullyDimerizedClosedForm) {
  // a = 0: C~(p) = (1 - cos p) / 4.
  for (const double p : {0.2, 1.0, 2.2, M_PI})
    EXPECT_NEAR(analytics::ssh_locfunc_limit(p, 1.0), 0.25 * (1.0 - std::cos(p)), 1e-10);
}

TEST(LtThermodynamic, DimerLimit) {
  EXPECT_NEAR(analytics::lt_thermodynamic(1.0), 0.125, 1e-6);
}

TEST(LtThermodynamic, MatchesFiniteSizeValue) {
  cli::PointSpec p;
  p.kind = cli::ModelKind::ssh;
  p.lattice = {610, Boundary::periodic, 305};
  p.delta = 0.5;
  const auto res = cli::evaluate_point(p);
  const double finite = res.raw.r / 610.0;
  const double limit = analytics::lt_thermodynamic(0.5);
  EXPECT_LE(std::abs(finite - limit) / limit, 0.01);
}

TEST(LtThermodynamic, GrowsTowardTheGaplessPoint) {
  double prev = 0.0;
  for (const double delta : {0.8, 0.4, 0.2, 0.1}) {
    const double value = analytics::lt_thermodynamic(delta);
    EXPECT_GT(value, prev) << "delta=" << delta;
    prev = value;
  }
}

TEST(LtThermodynamic, DivergentAtZero) {
  EXPECT_THROW(analytics::lt_thermodynamic(0.0), std::invalid_argument);
}

TEST(LocfuncEstimate, ExactZeroAtZeroMomentum) {
  const auto orb = freefermion::diagonalize(
      models::build_aa_single(30, 1.0, 2.0, golden_beta(), 0.0, Boundary::periodic), 10);
  EXPECT_EQ(analytics::locfunc_localized_estimate(orb, 0), 0.0);
}

TEST(LocfuncEstimate, SingleSiteOrbitalsGiveZero) {
  freefermion::OrbitalSet orb;
  const int n = 10;
  orb.energies = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  orb.orbitals = Eigen::MatrixXcd::Identity(n, n);
  orb.n_occupied = 4;
  for (int p = 0; p < n; ++p)
    EXPECT_NEAR(analytics::locfunc_localized_estimate(orb, p), 0.0, 1e-12);
}

TEST(LocfuncEstimate, TracksExactCurveInDiluteLocalizedRegime) {
  const int n = 610, m = 20;
  cli::PointSpec p;
  p.kind = cli::ModelKind::aa_free;
  p.lattice = {n, Boundary::periodic, m};
  p.delta = 3.0;
  const auto res = cli::evaluate_point(p);
  for (int idx = 1; idx <= n / 2; ++idx) {
    const double est = analytics::locfunc_localized_estimate(*res.orbitals, idx);
    const double exact = res.sf.diagonal(idx);
    EXPECT_LE(std::abs(est - exact), 0.1 * std::abs(exact)) << "p=" << idx;
  }
}

TEST(IprBound, SingleSiteOrbitalsGiveZeroBound) {
  freefermion::OrbitalSet orb;
  orb.energies = Eigen::VectorXd::Zero(6);
  orb.orbitals = Eigen::MatrixXcd::Identity(6, 6);
  orb.n_occupied = 3;
  EXPECT_NEAR(analytics::ipr_bound(orb), 0.0, 1e-14);
}

TEST(IprBound, PlaneWaveClosedForm) {
  const int n = 16, m = 5;
  freefermion::OrbitalSet waves;
  waves.energies = Eigen::VectorXd::Zero(n);
  waves.orbitals = Eigen::MatrixXcd(n, n);
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x)
      waves.orbitals(x, k) =
          std::exp(std::complex<double>(0.0, momentum_angle(k * x % n, n))) / std::sqrt(double(n));
  waves.n_occupied = m;
  EXPECT_NEAR(analytics::ipr_bound(waves),
              (static_cast<double>(m) / n) * (2.0 - 2.0 / n), 1e-12);
}

TEST(IprBound, BoundsLocalizationFunctionInDiluteRegime) {
  const int n = 610, m = 20;
  double prev_bound = std::numeric_limits<double>::infinity();
  for (const double delta : {2.5, 3.0, 4.0}) {
    cli::PointSpec p;
    p.kind = cli::ModelKind::aa_free;
    p.lattice = {n, Boundary::periodic, m};
    p.delta = delta;
    const auto res = cli::evaluate_point(p);
    const double bound = analytics::ipr_bound(*res.orbitals);
    EXPECT_LE(res.sf.diagonal.maxCoeff(), bound + 0.02) << "delta=" << delta;
    EXPECT_LT(bound, prev_bound);
    prev_bound = bound;
  }
}

TEST(FitSmallP, FreeRingLinear) {
  cli::PointSpec p;
  p.kind = cli::ModelKind::ssh;
  p.lattice = {610, Boundary::periodic, 305};
  const auto res = cli::evaluate_point(p);
  const auto fit = analytics::fit_small_p(res.sf);
  EXPECT_NEAR(fit.exponent, 1.0, 0.01);
}

TEST(FitSmallP, QuadraticBranches) {
  cli::PointSpec ssh;
  ssh.kind = cli::ModelKind::ssh;
  ssh.lattice = {610, Boundary::periodic, 305};
  ssh.delta = 0.5;
  EXPECT_GE(analytics::fit_small_p(cli::evaluate_point(ssh).sf).exponent, 1.8);
  EXPECT_LE(analytics::fit_small_p(cli::evaluate_point(ssh).sf).exponent, 2.2);

  cli::PointSpec aa;
  aa.kind = cli::ModelKind::aa_free;
  aa.lattice = {610, Boundary::periodic, 305};
  aa.delta = 3.0;
  const double e = analytics::fit_small_p(cli::evaluate_point(aa).sf).exponent;
  EXPECT_GE(e, 1.8);
  EXPECT_LE(e, 2.2);
}

TEST(FitSmallP, WindowValidation) {
  correlations::StructureFactor sf;
  sf.n_sites = 610;
  sf.diagonal = Eigen::VectorXd::Zero(610);
  // All zeros: every point filtered out.
  EXPECT_THROW(analytics::fit_small_p(sf), std::runtime_error);
  sf.diagonal = Eigen::VectorXd::Constant(610, 0.1);
  EXPECT_THROW(analytics::fit_small_p(sf, 1, 200), std::invalid_argument);
  EXPECT_THROW(analytics::fit_small_p(sf, 0, 4), std::invalid_argument);
}

TEST(Classify, ThreeReferenceVerdicts) {
  cli::PointSpec free_ring;
  free_ring.kind = cli::ModelKind::ssh;
  free_ring.lattice = {610, Boundary::periodic, 305};
  EXPECT_EQ(cli::classify_point(free_ring).label, analytics::Phase::extended);

  cli::PointSpec dimer = free_ring;
  dimer.delta = 0.5;
  const auto dv = cli::classify_point(dimer);
  EXPECT_EQ(dv.label, analytics::Phase::dimerized);
  EXPECT_NEAR(dv.c_at_pi, 0.5, 0.05);

  cli::PointSpec localized;
  localized.kind = cli::ModelKind::aa_free;
  localized.lattice = {610, Boundary::periodic, 305};
  localized.delta = 3.0;
  const auto lv = cli::classify_point(localized);
  EXPECT_EQ(lv.label, analytics::Phase::localized);
  ASSERT_TRUE(lv.bound_margin.has_value());
  EXPECT_GE(*lv.bound_margin, -0.02);
}

TEST(Classify, InconclusiveOnIntermediateExponent) {
  correlations::StructureFactor sf;
  sf.n_sites = 610;
  sf.diagonal.resize(610);
  for (int p = 0; p < 610; ++p) {
    const double angle = momentum_angle(std::min(p, 610 - p), 610);
    sf.diagonal(p) = 0.05 * std::pow(angle, 1.5);
  }
  EXPECT_EQ(analytics::classify(sf).label, analytics::Phase::inconclusive);
}
