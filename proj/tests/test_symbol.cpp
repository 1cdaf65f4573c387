#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "psdo/gallery.hpp"
#include "psdo/symbol.hpp"
#include "psdo/symbol_io.hpp"

using namespace psdo;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

double max_abs_diff(const ClassicalSymbol& a, const ClassicalSymbol& b,
                    int down_to) {
  double d = 0.0;
  for (int p = 0; p <= down_to; ++p)
    for (Sheet s : kSheets) {
      const auto x = a.component(-p).sheet(s).data();
      const auto y = b.component(-p).sheet(s).data();
      for (std::size_t i = 0; i < x.size(); ++i)
        d = std::max(d, std::abs(x[i] - y[i]));
    }
  return d;
}

ClassicalSymbol single_mode(int degree, int truncation, int cutoff, int mode_plus,
                            Complex plus, int mode_minus, Complex minus) {
  ClassicalSymbol a(1, truncation, cutoff);
  a.component(degree).sheet(Sheet::Plus) =
      MatrixSeries::mode(1, cutoff, mode_plus, plus);
  a.component(degree).sheet(Sheet::Minus) =
      MatrixSeries::mode(1, cutoff, mode_minus, minus);
  return a;
}

// Oracle: (1/k!) d_xi^k a(x, xi) * D_x^k b(x, xi) for k <= 2 by central
// finite differences of the evaluation routine.
Eigen::MatrixXcd expansion_term_fd(const HomogeneousComponent& a,
                                   const HomogeneousComponent& b, double x,
                                   double xi, int k) {
  const double h = 1e-3;
  auto dxi = [&](const HomogeneousComponent& c, int order) -> Eigen::MatrixXcd {
    if (order == 0) return c.evaluate(x, xi);
    if (order == 1)
      return (c.evaluate(x, xi + h) - c.evaluate(x, xi - h)) / (2 * h);
    return (c.evaluate(x, xi + h) - 2.0 * c.evaluate(x, xi) +
            c.evaluate(x, xi - h)) /
           (h * h);
  };
  auto dx = [&](const HomogeneousComponent& c, int order) -> Eigen::MatrixXcd {
    // D_x = -i d/dx
    if (order == 0) return c.evaluate(x, xi);
    if (order == 1)
      return -kI * (c.evaluate(x + h, xi) - c.evaluate(x - h, xi)) / (2 * h);
    return -(c.evaluate(x + h, xi) - 2.0 * c.evaluate(x, xi) +
             c.evaluate(x - h, xi)) /
           (h * h);
  };
  const double fact = k == 2 ? 2.0 : 1.0;
  return dxi(a, k) * dx(b, k) / fact;
}

}  // namespace

TEST(LinearCombine, AdditiveInverseIsZero) {
  Rng rng(7);
  const auto a = random_symbol(rng, 2, 3, 6);
  const std::vector<ClassicalSymbol> syms{a, a};
  const std::vector<Complex> coeffs{1.0, -1.0};
  EXPECT_TRUE(linear_combine(coeffs, syms).is_zero());
}

TEST(LinearCombine, ScalarScalingOfIdentity) {
  const auto id = ClassicalSymbol::identity(3, 2, 4);
  const std::vector<ClassicalSymbol> syms{id};
  const std::vector<Complex> coeffs{2.0};
  const auto out = linear_combine(coeffs, syms);
  EXPECT_EQ(out, ClassicalSymbol::multiplication(
                     2.0 * Eigen::MatrixXcd::Identity(3, 3), 2, 4));
}

TEST(LinearCombine, ZeroCoefficientLeavesFirstArgument) {
  Rng rng(8);
  const auto a = random_symbol(rng, 2, 3, 5);
  const auto b = random_symbol(rng, 2, 3, 5);
  const std::vector<ClassicalSymbol> syms{a, b};
  const std::vector<Complex> coeffs{1.0, 0.0};
  EXPECT_EQ(linear_combine(coeffs, syms), a);
}

TEST(LinearCombine, TruncationIsMaxOfInputs) {
  const std::vector<ClassicalSymbol> syms{ClassicalSymbol(2, 1, 3),
                                          ClassicalSymbol(2, 4, 3)};
  const std::vector<Complex> coeffs{1.0, 1.0};
  EXPECT_EQ(linear_combine(coeffs, syms).truncation(), 4);
}

TEST(LinearCombine, ShapeMismatchThrows) {
  const std::vector<ClassicalSymbol> rank{ClassicalSymbol(2, 1, 3),
                                          ClassicalSymbol(1, 1, 3)};
  const std::vector<ClassicalSymbol> cutoff{ClassicalSymbol(2, 1, 3),
                                            ClassicalSymbol(2, 1, 4)};
  const std::vector<Complex> coeffs{1.0, 1.0};
  EXPECT_THROW(linear_combine(coeffs, rank), ShapeError);
  EXPECT_THROW(linear_combine(coeffs, cutoff), ShapeError);
}

TEST(XiDerivative, DegreeZeroGivesZero) {
  Rng rng(1);
  const auto a = random_symbol(rng, 2, 0, 4);
  const auto d = xi_derivative(a.component(0));
  EXPECT_EQ(d.degree(), -1);
  EXPECT_TRUE(d.is_zero());
}

TEST(XiDerivative, FlipsMinusSheet) {
  HomogeneousComponent c(-1, MatrixSeries::mode(1, 2, 1, 1.0),
                         MatrixSeries::mode(1, 2, 1, 1.0));
  const auto d = xi_derivative(c);
  EXPECT_EQ(d.degree(), -2);
  EXPECT_EQ(d.sheet(Sheet::Plus), MatrixSeries::mode(1, 2, 1, -1.0));
  EXPECT_EQ(d.sheet(Sheet::Minus), MatrixSeries::mode(1, 2, 1, 1.0));
}

TEST(XiDerivative, TwiceOnDegreeMinusOne) {
  HomogeneousComponent c(-1, MatrixSeries::mode(1, 0, 0, 1.0),
                         MatrixSeries::mode(1, 0, 0, 1.0));
  const auto d = xi_derivative(xi_derivative(c));
  EXPECT_EQ(d.degree(), -3);
  EXPECT_EQ(d.sheet(Sheet::Plus), MatrixSeries::mode(1, 0, 0, 2.0));
  EXPECT_EQ(d.sheet(Sheet::Minus), MatrixSeries::mode(1, 0, 0, 2.0));
}

TEST(XDerivative, FourierRule) {
  HomogeneousComponent constant(0, MatrixSeries::mode(1, 3, 0, 5.0),
                                MatrixSeries::mode(1, 3, 0, 5.0));
  EXPECT_TRUE(x_derivative(constant).is_zero());

  HomogeneousComponent e1(-2, MatrixSeries::mode(1, 3, 1, 1.0),
                          MatrixSeries::mode(1, 3, 1, 1.0));
  const auto d1 = x_derivative(e1);
  EXPECT_EQ(d1.degree(), -2);
  EXPECT_EQ(d1.sheet(Sheet::Plus), MatrixSeries::mode(1, 3, 1, 1.0));

  HomogeneousComponent em2(0, MatrixSeries::mode(1, 3, -2, 1.0),
                           MatrixSeries::mode(1, 3, -2, 1.0));
  EXPECT_EQ(x_derivative(em2).sheet(Sheet::Minus),
            MatrixSeries::mode(1, 3, -2, -2.0));
}

TEST(Homogeneity, ScalingInXi) {
  Rng rng(11);
  const auto a = random_symbol(rng, 2, 4, 6);
  for (int p = 0; p <= 4; ++p) {
    const auto& c = a.component(-p);
    for (double x : {0.3, 2.1, 5.0})
      for (double xi : {1.5, -0.7})
        for (double lambda : {2.0, 10.0}) {
          const Eigen::MatrixXcd lhs = c.evaluate(x, lambda * xi);
          const Eigen::MatrixXcd rhs = std::pow(lambda, -p) * c.evaluate(x, xi);
          EXPECT_LE((lhs - rhs).norm(), 1e-14 * (1.0 + rhs.norm()));
        }
  }
}

TEST(Homogeneity, EvaluationAtZeroIsRejected) {
  HomogeneousComponent c(-1, 1, 2);
  EXPECT_THROW(c.evaluate(0.0, 0.0), ConfigError);
}

TEST(XiDerivative, AgreesWithFiniteDifferences) {
  Rng rng(12);
  const auto a = random_symbol(rng, 2, 4, 6);
  const double h = 1e-4;
  for (int p = 0; p <= 4; ++p) {
    const auto& c = a.component(-p);
    const auto d = xi_derivative(c);
    for (double xi : {1.5, -1.5})
      for (double x : {0.1, 1.9, 4.4}) {
        const Eigen::MatrixXcd fd =
            (c.evaluate(x, xi + h) - c.evaluate(x, xi - h)) / (2 * h);
        const Eigen::MatrixXcd exact = d.evaluate(x, xi);
        if (p == 0) {
          EXPECT_LE(fd.norm(), 1e-9);
          EXPECT_TRUE(d.is_zero());
        } else {
          EXPECT_LE((fd - exact).norm(), 1e-6 * exact.norm());
        }
      }
  }
}

TEST(Compose, DegreeZeroIsPointwiseProduct) {
  Rng rng(2);
  const auto a = random_symbol(rng, 2, 0, 4, {.include_degree_zero = true, .bandwidth = 2});
  const auto b = random_symbol(rng, 2, 0, 4, {.include_degree_zero = true, .bandwidth = 2});
  ClassicalSymbol a3 = truncated(a, 3), b3 = truncated(b, 3);
  const auto ab = compose(a3, b3, 3);
  for (int p = 1; p <= 3; ++p) EXPECT_TRUE(ab.component(-p).is_zero());
  for (double x : {0.2, 3.3})
    for (double xi : {1.0, -1.0}) {
      const Eigen::MatrixXcd expect = a.evaluate(x, xi) * b.evaluate(x, xi);
      EXPECT_LE((ab.evaluate(x, xi) - expect).norm(), 1e-13);
    }
}

TEST(Compose, DegreeMinusOneExpansion) {
  // a = b = e^{ix} |xi|^{-1} on both sheets. By hand:
  //   k = 0: e^{2ix} |xi|^{-2}
  //   k = 1: d_xi a * D_x b = -sgn(xi) e^{ix} |xi|^{-2} * e^{ix} |xi|^{-1}
  const auto a = single_mode(-1, 3, 4, 1, 1.0, 1, 1.0);
  const auto ab = compose(a, a, 3);
  EXPECT_TRUE(ab.component(0).is_zero());
  EXPECT_TRUE(ab.component(-1).is_zero());
  EXPECT_EQ(ab.component(-2).sheet(Sheet::Plus), MatrixSeries::mode(1, 4, 2, 1.0));
  EXPECT_EQ(ab.component(-2).sheet(Sheet::Minus), MatrixSeries::mode(1, 4, 2, 1.0));
  EXPECT_EQ(ab.component(-3).sheet(Sheet::Plus), MatrixSeries::mode(1, 4, 2, -1.0));
  EXPECT_EQ(ab.component(-3).sheet(Sheet::Minus), MatrixSeries::mode(1, 4, 2, 1.0));
}

TEST(Compose, TermsMatchFiniteDifferenceOracle) {
  // For single homogeneous components the k-th expansion term is the whole
  // component of degree m_a + m_b - k.
  Rng rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const int ma = -(trial % 2) - 1;
    const int mb = -((trial / 2) % 2);
    const auto ra = random_symbol(rng, 2, 4, 8, {.include_degree_zero = true, .bandwidth = 3});
    const auto rb = random_symbol(rng, 2, 4, 8, {.include_degree_zero = true, .bandwidth = 3});
    ClassicalSymbol a(2, 4, 8), b(2, 4, 8);
    a.set_component(ra.component(ma));
    b.set_component(rb.component(mb));
    const auto ab = compose(a, b, 4);
    for (int k = 0; k <= 2; ++k) {
      const int degree = ma + mb - k;
      if (degree < -4) continue;
      for (double xi : {1.3, -1.7})
        for (double x : {0.4, 2.8}) {
          const Eigen::MatrixXcd oracle =
              expansion_term_fd(a.component(ma), b.component(mb), x, xi, k);
          const Eigen::MatrixXcd got = ab.component(degree).evaluate(x, xi);
          EXPECT_LE((got - oracle).norm(), 1e-4 * (1.0 + oracle.norm()))
              << "ma=" << ma << " mb=" << mb << " k=" << k;
        }
    }
  }
}

TEST(Compose, RejectsBadTruncation) {
  ClassicalSymbol a(1, 2, 3), b(1, 4, 3);
  EXPECT_THROW(compose(a, b, 3), ConfigError);
  EXPECT_THROW(compose(a, b, -1), ConfigError);
  EXPECT_THROW(compose(a, ClassicalSymbol(2, 2, 3), 1), ShapeError);
  EXPECT_THROW(compose(a, ClassicalSymbol(1, 2, 4), 1), ShapeError);
}

TEST(Compose, AssociativeForBandLimitedSymbols) {
  // Products stay below the cutoff when each factor has bandwidth <= F/3.
  Rng rng(31);
  const RandomSymbolOptions opts{.include_degree_zero = true, .bandwidth = 4};
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_symbol(rng, 2, 4, 12, opts);
    const auto b = random_symbol(rng, 2, 4, 12, opts);
    const auto c = random_symbol(rng, 2, 4, 12, opts);
    const auto left = compose(compose(a, b, 4), c, 4);
    const auto right = compose(a, compose(b, c, 4), 4);
    EXPECT_LE(max_abs_diff(left, right, 4), 1e-10);
  }
}

TEST(Compose, LeadingTermMultiplicative) {
  Rng rng(32);
  const auto a = random_symbol(rng, 2, 4, 6);
  const auto b = random_symbol(rng, 2, 4, 6);
  const auto ab = compose(a, b, 4);
  for (Sheet s : kSheets) {
    const auto expect =
        multiply(a.component(0).sheet(s), b.component(0).sheet(s));
    EXPECT_EQ(ab.component(0).sheet(s), expect);
  }
}

TEST(Adjoint, HermitianConstantIsFixed) {
  Eigen::MatrixXcd h(2, 2);
  h << 1.0, Complex(0.5, -2.0), Complex(0.5, 2.0), -3.0;
  const auto a = ClassicalSymbol::multiplication(h, 3, 4);
  EXPECT_EQ(adjoint(a, 3), a);
}

TEST(Adjoint, ImaginaryIdentityFlipsSign) {
  const auto a = ClassicalSymbol::multiplication(
      kI * Eigen::MatrixXcd::Identity(2, 2), 2, 3);
  const auto expect = ClassicalSymbol::multiplication(
      -kI * Eigen::MatrixXcd::Identity(2, 2), 2, 3);
  EXPECT_EQ(adjoint(a, 2), expect);
}

TEST(Adjoint, Involution) {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_symbol(rng, 2, 4, 16);
    EXPECT_LE(max_abs_diff(adjoint(adjoint(a, 4), 4), a, 4), 1e-10);
  }
}

TEST(Adjoint, LowerOrderTermFromCalculus) {
  // a = e^{ix} |xi|^{-1}: a* = e^{-ix}|xi|^{-1} + d_xi D_x e^{-ix}|xi|^{-1}
  //   = e^{-ix}|xi|^{-1} + sgn(xi) e^{-ix} |xi|^{-2}.
  const auto a = single_mode(-1, 2, 3, 1, 1.0, 1, 1.0);
  const auto s = adjoint(a, 2);
  EXPECT_EQ(s.component(-1).sheet(Sheet::Plus), MatrixSeries::mode(1, 3, -1, 1.0));
  EXPECT_EQ(s.component(-2).sheet(Sheet::Plus), MatrixSeries::mode(1, 3, -1, 1.0));
  EXPECT_EQ(s.component(-2).sheet(Sheet::Minus), MatrixSeries::mode(1, 3, -1, -1.0));
}

TEST(Commutator, ScalarDegreeZeroCommute) {
  Rng rng(51);
  const auto a = random_symbol(rng, 1, 0, 5);
  const auto b = random_symbol(rng, 1, 0, 5);
  const auto c = commutator(truncated(a, 2), truncated(b, 2), 2);
  EXPECT_LE(max_abs_diff(c, ClassicalSymbol(1, 2, 5), 2), 1e-15);
}

TEST(Commutator, ConstantMatrices) {
  Eigen::MatrixXcd p(2, 2), q(2, 2);
  p << 0, 1, 0, 0;
  q << 0, 0, 1, 0;
  const auto c = commutator(ClassicalSymbol::multiplication(p, 2, 1),
                            ClassicalSymbol::multiplication(q, 2, 1), 2);
  EXPECT_EQ(c, ClassicalSymbol::multiplication(p * q - q * p, 2, 1));
}

TEST(Commutator, DegreeMinusOnePair) {
  // a = e^{ix}|xi|^{-1}, b = e^{-ix}|xi|^{-1}. Degree -2 terms commute; at
  // degree -3, d_xi a D_x b - d_xi b D_x a = 2 sgn(xi) |xi|^{-3}.
  const auto a = single_mode(-1, 3, 3, 1, 1.0, 1, 1.0);
  const auto b = single_mode(-1, 3, 3, -1, 1.0, -1, 1.0);
  const auto c = commutator(a, b, 3);
  EXPECT_TRUE(c.component(-2).is_zero());
  EXPECT_EQ(c.component(-3).sheet(Sheet::Plus), MatrixSeries::mode(1, 3, 0, 2.0));
  EXPECT_EQ(c.component(-3).sheet(Sheet::Minus), MatrixSeries::mode(1, 3, 0, -2.0));
  // Same value from the finite-difference oracle.
  const Eigen::MatrixXcd oracle =
      expansion_term_fd(a.component(-1), b.component(-1), 0.7, 1.4, 1) -
      expansion_term_fd(b.component(-1), a.component(-1), 0.7, 1.4, 1);
  EXPECT_NEAR(std::abs(oracle(0, 0) - 2.0 * std::pow(1.4, -3)), 0.0, 1e-5);
}

TEST(SymbolIo, RoundTripIsBitExact) {
  Rng rng(61);
  for (int trial = 0; trial < 3; ++trial) {
    auto a = random_symbol(rng, 2, 3, 5);
    a.component(-2).sheet(Sheet::Minus).at(1, 0, 1) = Complex(-0.0, 1e-310);
    a.component(0).sheet(Sheet::Plus).at(0, 1, 1) = Complex(1.0 / 3.0, -kPi);
    const std::string text = to_string(a);
    const auto back = symbol_from_string(text);
    EXPECT_EQ(back, a);
    EXPECT_EQ(to_string(back), text);
    EXPECT_TRUE(std::signbit(back.component(-2).sheet(Sheet::Minus).at(1, 0, 1).real()));
  }
}

TEST(SymbolIo, MalformedInputThrows) {
  EXPECT_THROW(symbol_from_string("psdo-symbol 2\n"), FormatError);
  EXPECT_THROW(symbol_from_string("garbage"), FormatError);
  std::string text = to_string(ClassicalSymbol(1, 0, 0));
  text.replace(text.find("end"), 3, "xyz");
  EXPECT_THROW(symbol_from_string(text), FormatError);
}
