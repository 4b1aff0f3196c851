#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "loclab/correlations.hpp"
#include "loclab/freefermion.hpp"
#include "loclab/models.hpp"
#include "loclab/analytics.hpp"
#include "loclab/indicators.hpp"
#include "loclab/oracle.hpp"

using namespace loclab;

TEST(EdFreeCheck, DegenerateFermiLevelIsSkipped) {
  // The uniform 4-ring at half filling has a degenerate Fermi level; feed
  // it through the instance runner and expect the skip path.
  const auto report = oracle::ed_free_check(4, 2, 0);
  EXPECT_EQ(report.instance_count, 0);
  const auto skip = oracle::wick_vs_ed_once(
      models::build_ssh(4, 0.0, Boundary::periodic).matrix, 2);
  EXPECT_FALSE(skip.has_value());
}

TEST(EdFreeCheck, TwoSiteHandAlgebra) {
  Eigen::MatrixXcd h(2, 2);
  h << 0.0, -1.0, -1.0, 0.0;
  const auto dev = oracle::wick_vs_ed_once(h, 1);
  ASSERT_TRUE(dev.has_value());
  EXPECT_LE(*dev, 1e-14);
  // Bonding orbital: <n n> = [[1/2, 0], [0, 1/2]] on the diagonal pairs.
  const auto orb = freefermion::diagonalize(
      [&] {
        models::SingleParticleHamiltonian sp;
        sp.n_sites = 2;
        sp.matrix = h;
        return sp;
      }(),
      1);
  const auto cd = freefermion::correlations_from_fermi_sea(orb);
  EXPECT_NEAR(cd.c(0, 0), 0.25, 1e-14);
  EXPECT_NEAR(cd.c(0, 1), -0.25, 1e-14);
  EXPECT_NEAR(cd.nn()(0, 1), 0.0, 1e-14);
}

TEST(EdFreeCheck, FiftyRandomInstances) {
  const auto report = oracle::ed_free_check(6, 3, 50);
  EXPECT_EQ(report.instance_count + report.skipped, 50);
  EXPECT_LE(report.max_abs_deviation, 1e-10);
  EXPECT_EQ(report.seed, 0x51dbeefu);
  EXPECT_TRUE(report.passed());
}

TEST(EdFreeCheck, BandwidthLimitedInstances) {
  // Hopping-model-like structure: nearest-neighbour band only.
  const auto report = oracle::ed_free_check(6, 3, 20, 0x77u, 1);
  EXPECT_EQ(report.instance_count + report.skipped, 20);
  EXPECT_LE(report.max_abs_deviation, 1e-10);
}

TEST(EdFreeCheck, SizeGuard) {
  EXPECT_THROW(oracle::ed_free_check(11, 3, 1), std::invalid_argument);
}

TEST(StructureFactorNaive, UniformRingMatchesTransform) {
  const auto cd = freefermion::correlations_from_fermi_sea(
      freefermion::diagonalize(models::build_ssh(4, 0.0, Boundary::periodic), 2));
  const auto naive = oracle::structure_factor_naive(cd);
  const auto fast = correlations::structure_factor(cd, true);
  EXPECT_LE((naive - *fast.full).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(std::abs(naive(0, 0)), 1e-14);
}

TEST(StructureFactorNaive, DimerizedChain) {
  const auto cd = freefermion::correlations_from_fermi_sea(
      freefermion::diagonalize(models::build_ssh(12, 0.5, Boundary::periodic), 6));
  const auto naive = oracle::structure_factor_naive(cd);
  const auto fast = correlations::structure_factor(cd, true);
  EXPECT_LE((naive - *fast.full).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StructureFactorNaive, SizeGuard) {
  freefermion::CorrelationData cd;
  cd.n_sites = 40;
  cd.c = Eigen::MatrixXd::Zero(40, 40);
  cd.density = Eigen::VectorXd::Zero(40);
  EXPECT_THROW(oracle::structure_factor_naive(cd), std::invalid_argument);
}

TEST(FrechetGrid, PointMass) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(20);
  g(4) = 1.0;
  const auto v = oracle::frechet_grid(g, 200);
  EXPECT_NEAR(v.variance, 0.0, 1e-12);
}

TEST(FrechetGrid, ResolutionGuard) {
  EXPECT_THROW(oracle::frechet_grid(Eigen::VectorXd::Constant(20, 0.05), 100),
               std::invalid_argument);
}

TEST(DimerClosedForm, MatchesPipelineExactly) {
  const int n = 12;
  const auto dimer = oracle::dimer_closed_form(n);
  EXPECT_DOUBLE_EQ(dimer.diagonal(n / 2), 0.5);

  const auto cd = freefermion::correlations_from_fermi_sea(
      freefermion::diagonalize(models::build_ssh(n, 1.0, Boundary::periodic), n / 2));
  EXPECT_LE((cd.c - dimer.c).cwiseAbs().maxCoeff(), 1e-12);
  const auto sf = correlations::structure_factor(cd);
  EXPECT_LE((sf.diagonal - dimer.diagonal).cwiseAbs().maxCoeff(), 1e-12);

  // The delta = 1 closed form coincides with the large-N quadrature limit.
  for (int p = 0; p <= n / 2; ++p)
    EXPECT_NEAR(dimer.diagonal(p), analytics::ssh_locfunc_limit(momentum_angle(p, n), 1.0),
                1e-9);
}

TEST(DimerClosedForm, RestaCumulantIdentity) {
  const int n = 12;
  const auto dimer = oracle::dimer_closed_form(n);
  const auto cd = freefermion::correlations_from_fermi_sea(
      freefermion::diagonalize(models::build_ssh(n, 1.0, Boundary::periodic), n / 2));
  EXPECT_NEAR(indicators::lt_resta(cd), dimer.lambda_resta, 1e-10);
}
