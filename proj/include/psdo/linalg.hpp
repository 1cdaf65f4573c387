#pragma once

// Dense linear-algebra helpers shared by the symbol and operator layers.

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "psdo/errors.hpp"
#include "psdo/random.hpp"

namespace psdo {

struct PowerIterationOptions {
  double relative_tolerance = 1e-9;
  int max_iterations = 10000;
};

/// Largest singular value of B by power iteration on B^* B.
///
/// The start vector is drawn from a fixed-seed generator so results are
/// reproducible. Stops when successive estimates agree to the relative
/// tolerance; throws NumericalFailure with the last estimate otherwise.
inline double largest_singular_value(const Eigen::MatrixXcd& b,
                                     const PowerIterationOptions& opts = {}) {
  if (b.size() == 0) return 0.0;
  if (b.isZero(0.0)) return 0.0;
  Rng rng(0x5eed'0f'5eedULL);
  Eigen::VectorXcd v(b.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXcd w = b * v;
    const double next = w.norm();
    if (next == 0.0) {
      // Start vector in the kernel; restart from a fresh draw.
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
      v.normalize();
      continue;
    }
    Eigen::VectorXcd u = b.adjoint() * w;
    const double un = u.norm();
    v = u / un;
    if (it > 0 && std::abs(next - sigma) <= opts.relative_tolerance * next) {
      return next;
    }
    sigma = next;
  }
  throw NumericalFailure("power iteration did not converge", sigma);
}

/// Spectral norm of a small matrix. Closed form for l <= 2, Hermitian
/// eigensolver up to l = 4, power iteration above.
inline double spectral_norm(const Eigen::MatrixXcd& m) {
  const auto n = m.rows();
  if (n == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (n == 2 && m.cols() == 2) {
    const double fro2 = m.squaredNorm();
    const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
  }
  if (n <= 4 && m.cols() <= 4) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m,
                                                       Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  return largest_singular_value(m);
}

}  // namespace psdo
