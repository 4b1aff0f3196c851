#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "loclab/correlations.hpp"
#include "loclab/freefermion.hpp"
#include "loclab/indicators.hpp"
#include "loclab/models.hpp"
#include "loclab/oracle.hpp"

using namespace loclab;

namespace {

freefermion::CorrelationData pipeline(const models::SingleParticleHamiltonian& h, int m) {
  return freefermion::correlations_from_fermi_sea(freefermion::diagonalize(h, m));
}

freefermion::CorrelationData single_particle_point(int n, int site) {
  freefermion::CorrelationData cd;
  cd.n_sites = n;
  cd.n_particles = 1;
  cd.has_g = false;
  cd.density = Eigen::VectorXd::Zero(n);
  cd.density(site) = 1.0;
  cd.c = Eigen::MatrixXd::Zero(n, n);
  return cd;
}

}  // namespace

TEST(JointDistribution, PointMass) {
  const auto cd = single_particle_point(3, 1);
  const auto f = correlations::joint_distribution(cd, 1);
  EXPECT_DOUBLE_EQ(f.table(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(f.table.sum(), 1.0);
  EXPECT_DOUBLE_EQ(f.marginal(1), 1.0);
}

TEST(JointDistribution, UniformRingMarginals) {
  const auto cd = pipeline(models::build_ssh(4, 0.0, Boundary::periodic), 2);
  const auto f = correlations::joint_distribution(cd, 2);
  EXPECT_NEAR(f.table.sum(), 1.0, 1e-10);
  for (int x = 0; x < 4; ++x) EXPECT_NEAR(f.marginal(x), 0.25, 1e-10);
}

TEST(JointDistribution, DimerizedChainNormalizedSymmetric) {
  const auto cd = pipeline(models::build_ssh(200, 0.5, Boundary::periodic), 100);
  const auto f = correlations::joint_distribution(cd, 100);
  EXPECT_NEAR(f.table.sum(), 1.0, 1e-10);
  EXPECT_LE((f.table - f.table.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  // Marginal identity against the density.
  for (int x = 0; x < 200; ++x)
    EXPECT_NEAR(f.marginal(x), cd.density(x) / 100.0, 1e-10);
}

TEST(JointDistribution, NegativityHandling) {
  auto cd = single_particle_point(3, 0);
  cd.c(1, 2) = cd.c(2, 1) = -5e-13;  // clamped and renormalized
  const auto f = correlations::joint_distribution(cd, 1);
  EXPECT_DOUBLE_EQ(f.table(1, 2), 0.0);
  EXPECT_NEAR(f.table.sum(), 1.0, 1e-15);

  cd.c(1, 2) = cd.c(2, 1) = -1e-9;  // upstream bug territory
  EXPECT_THROW(correlations::joint_distribution(cd, 1), std::runtime_error);
}

TEST(StructureFactor, FreeRingClosedForm) {
  for (const int n : {12, 200}) {
    const auto cd = pipeline(models::build_ssh(n, 0.0, Boundary::periodic), n / 2);
    const auto sf = correlations::structure_factor(cd);
    for (int p = 0; p <= n / 2; ++p)
      EXPECT_NEAR(sf.diagonal(p), static_cast<double>(p) / n, 1e-12) << "N=" << n << " p=" << p;
    for (int p = n / 2; p < n; ++p)
      EXPECT_NEAR(sf.diagonal(p), static_cast<double>(n - p) / n, 1e-12);
  }
}

TEST(StructureFactor, ZeroModeVanishesForFixedParticleNumber) {
  const auto cd = pipeline(models::build_aa_single(89, 1.0, 2.0, golden_beta(), 0.0,
                                                   Boundary::periodic),
                           34);
  const auto sf = correlations::structure_factor(cd);
  EXPECT_NEAR(sf.diagonal(0), 0.0, 1e-10);
  EXPECT_GE(sf.diagonal.minCoeff(), -1e-12);
}

TEST(StructureFactor, MatchesLiteralDoubleSum) {
  for (const double delta : {0.0, 0.5}) {
    const auto cd = pipeline(models::build_ssh(12, delta, Boundary::periodic), 6);
    const auto fast = correlations::structure_factor(cd, true);
    const auto naive = oracle::structure_factor_naive(cd);
    EXPECT_LE((*fast.full - naive).cwiseAbs().maxCoeff(), 1e-12) << "delta=" << delta;
    // Diagonal-only path agrees with the full transform's diagonal.
    const auto diag_only = correlations::structure_factor(cd, false);
    EXPECT_LE((diag_only.diagonal - fast.diagonal).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(StructureFactor, DimerPlateauAtPi) {
  const auto cd = pipeline(models::build_ssh(610, 0.5, Boundary::periodic), 305);
  const auto sf = correlations::structure_factor(cd);
  EXPECT_NEAR(sf.diagonal(305), 0.5, 2e-3);
}

TEST(StructureFactor, ParsevalConsistency) {
  const auto cd = pipeline(models::build_ssh(200, 0.7, Boundary::periodic), 100);
  const auto sf = correlations::structure_factor(cd);
  EXPECT_NEAR(sf.diagonal.sum(), cd.c.trace(), 1e-10);

  const auto cd2 = pipeline(models::build_aa_single(144, 1.0, 2.0, golden_beta(), 0.0,
                                                    Boundary::periodic),
                            72);
  const auto sf2 = correlations::structure_factor(cd2);
  EXPECT_NEAR(sf2.diagonal.sum(), cd2.c.trace(), 1e-10);
}

TEST(StructureFactor, ConjugateSymmetryOfFullMatrix) {
  const auto cd = pipeline(models::build_aa_single(34, 1.0, 2.5, golden_beta(), 0.0,
                                                   Boundary::periodic),
                           17);
  const auto sf = correlations::structure_factor(cd, true);
  EXPECT_LE((sf.full->adjoint() - *sf.full).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(std::abs((*sf.full)(0, 0)), 1e-12);
}

TEST(StructureFactor, RejectsNonconservedCorrelator) {
  freefermion::CorrelationData cd;
  cd.n_sites = 4;
  cd.n_particles = 2;
  cd.density = Eigen::VectorXd::Constant(4, 0.5);
  cd.c = Eigen::MatrixXd::Identity(4, 4);  // row sums 1, not 0
  EXPECT_THROW(correlations::structure_factor(cd), std::invalid_argument);
}

TEST(DifferenceDistribution, PointAndShiftCases) {
  // Mass at (a, a): difference concentrates at d = 0.
  const auto cd = single_particle_point(5, 2);
  const auto f = correlations::joint_distribution(cd, 1);
  const auto g = correlations::difference_distribution(f);
  EXPECT_DOUBLE_EQ(g(0), 1.0);
  EXPECT_DOUBLE_EQ(g.sum(), 1.0);
}

TEST(DifferenceDistribution, TranslationInvariantShiftSum) {
  const int n = 6;
  const auto cd = pipeline(models::build_ssh(n, 0.0, Boundary::periodic), 3);
  const auto f = correlations::joint_distribution(cd, 3);
  const auto g = correlations::difference_distribution(f);
  for (int d = 0; d < n; ++d) EXPECT_NEAR(g(d), n * f.table(d, 0), 1e-12);
  EXPECT_NEAR(g.sum(), 1.0, 1e-10);
}

TEST(DifferenceDistribution, NormalizedOnDimerizedChain) {
  const auto cd = pipeline(models::build_ssh(200, 0.5, Boundary::periodic), 100);
  const auto f = correlations::joint_distribution(cd, 100);
  const auto g = correlations::difference_distribution(f);
  EXPECT_NEAR(g.sum(), 1.0, 1e-10);
  EXPECT_GE(g.minCoeff(), 0.0);
}

TEST(LtStructureIdentity, TranslationInvariantCaseReducesToFirstDiagonal) {
  const int n = 12;
  const auto cd = pipeline(models::build_ssh(n, 0.0, Boundary::periodic), 6);
  const auto sf = correlations::structure_factor(cd, true);
  EXPECT_LE(std::abs((*sf.full)(0, 1)), 1e-12);
  EXPECT_LE(std::abs((*sf.full)(1, 0)), 1e-12);
  const double expected =
      sf.diagonal(1) * std::pow(static_cast<double>(n), 3) / (4.0 * M_PI * M_PI);
  EXPECT_NEAR(correlations::lt_structure_identity(sf), expected, 1e-10);
}

TEST(LtStructureIdentity, AgreesWithPhaseOperatorCumulant) {
  const auto cd = pipeline(models::build_ssh(100, 0.3, Boundary::periodic), 50);
  const auto sf = correlations::structure_factor(cd, true);
  EXPECT_NEAR(correlations::lt_structure_identity(sf), indicators::lt_resta(cd), 1e-10);
}

TEST(LtStructureIdentity, RequiresFullMatrix) {
  const auto cd = pipeline(models::build_ssh(12, 0.0, Boundary::periodic), 6);
  const auto sf = correlations::structure_factor(cd, false);
  EXPECT_THROW(correlations::lt_structure_identity(sf), std::invalid_argument);
}
