#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "psdo/gallery.hpp"
#include "psdo/seminorm.hpp"

using namespace psdo;

namespace {

// Brute-force oracle: sup over a very fine x-grid of |D_x^beta h(x)|.
double dense_sup(const MatrixSeries& s, int beta, int points) {
  MatrixSeries d = s;
  for (int i = 0; i < beta; ++i) d = d.dx();
  double best = 0.0;
  for (int i = 0; i < points; ++i) {
    const Eigen::MatrixXcd m = d.evaluate(2.0 * std::numbers::pi * i / points);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

}  // namespace

TEST(SpectralNorm, MatchesSvdForSmallAndLargeRanks) {
  Rng rng(3);
  for (int l : {1, 2, 3, 4, 6}) {
    Eigen::MatrixXcd m(l, l);
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) m(i, j) = rng.complex_normal();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    EXPECT_NEAR(spectral_norm(m), svd.singularValues()(0),
                1e-8 * svd.singularValues()(0))
        << "rank " << l;
  }
}

TEST(Seminorm, IdentityHasUnitSupNorm) {
  const auto id = ClassicalSymbol::identity(2, 2, 4);
  EXPECT_NEAR(seminorm(id, 0, 0, 0), 1.0, 1e-14);
  EXPECT_EQ(seminorm(id, 1, 0, 0), 0.0);
  EXPECT_EQ(seminorm(id, 0, 1, 0), 0.0);
}

TEST(Seminorm, XDerivativeOfSingleMode) {
  ClassicalSymbol a(1, 2, 3);
  a.component(-1).sheet(Sheet::Plus) = MatrixSeries::mode(1, 3, 1, 1.0);
  EXPECT_NEAR(seminorm(a, 0, 1, 1), 1.0, 1e-14);
  // d_xi on the plus sheet of degree -1 multiplies by -1.
  EXPECT_NEAR(seminorm(a, 1, 1, 1), 1.0, 1e-14);
  EXPECT_NEAR(seminorm(a, 2, 0, 1), 2.0, 1e-14);
}

TEST(Seminorm, GridSupAgreesWithRefinedGrid) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_symbol(rng, 2, 4, 32);
    for (int m = 0; m <= 4; m += 2)
      for (int beta = 0; beta <= 2; ++beta) {
        const double coarse = seminorm(a, 1, beta, m);
        SeminormOptions fine;
        fine.grid_factor = 16;
        const double refined = seminorm(a, 1, beta, m, fine);
        EXPECT_NEAR(coarse, refined, 1e-6 * std::max(1.0, refined));
      }
  }
}

TEST(Seminorm, AgreesWithDenseSamplingOracle) {
  Rng rng(5);
  const auto a = random_symbol(rng, 2, 2, 16);
  for (int beta = 0; beta <= 1; ++beta) {
    const double oracle = dense_sup(a.component(-1).sheet(Sheet::Plus), beta, 40000);
    const double oracle_minus =
        dense_sup(a.component(-1).sheet(Sheet::Minus), beta, 40000);
    EXPECT_NEAR(seminorm(a, 0, beta, 1), std::max(oracle, oracle_minus),
                1e-6 * oracle);
  }
}

TEST(Seminorm, RejectsOutOfRange) {
  const ClassicalSymbol a(1, 2, 3);
  EXPECT_THROW(seminorm(a, 0, 0, 3), ConfigError);
  EXPECT_THROW(seminorm(a, 0, 0, -1), ConfigError);
  EXPECT_THROW(seminorm(a, 5, 0, 0), ConfigError);
}

TEST(MaxSeminorm, EqualsMaxOfIndividualSeminorms) {
  Rng rng(6);
  const auto a = random_symbol(rng, 2, 3, 8);
  double expect = 0.0;
  for (int m = 0; m <= 3; ++m)
    for (int alpha = 0; alpha <= 2; ++alpha)
      for (int beta = 0; beta <= 2; ++beta)
        expect = std::max(expect, seminorm(a, alpha, beta, m));
  EXPECT_DOUBLE_EQ(max_seminorm(a, 2), expect);
}

TEST(DecayConstant, Identity) {
  EXPECT_NEAR(minimal_decay_constant(ClassicalSymbol::identity(2, 3, 4)), 1.0,
              1e-14);
}

TEST(DecayConstant, PureDegreeMinusOneConstant) {
  // sup_xi c (1 + xi) / xi = 2c at xi = 1, and likewise for d_xi.
  for (double c : {0.5, 3.0}) {
    ClassicalSymbol a(1, 2, 2);
    for (Sheet s : kSheets)
      a.component(-1).sheet(s) = MatrixSeries::mode(1, 2, 0, c);
    EXPECT_NEAR(minimal_decay_constant(a), 2.0 * c, 1e-13 * c);
  }
}

TEST(DecayConstant, ZeroSymbol) {
  EXPECT_EQ(minimal_decay_constant(ClassicalSymbol(2, 3, 4)), 0.0);
}

TEST(DecayConstant, FiniteForRandomSymbols) {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_symbol(rng, 2, 4, 8);
    const double k = minimal_decay_constant(a);
    EXPECT_TRUE(std::isfinite(k));
    EXPECT_GE(k, seminorm(a, 0, 0, 0) - 1e-9);
  }
}
