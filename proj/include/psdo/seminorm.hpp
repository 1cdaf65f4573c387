#pragma once

// Symbol seminorms  sup_{x, |xi|=1} |d_x^beta d_xi^alpha sigma_{-m}|  and the
// decay constant of the class Op_1^K.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "psdo/linalg.hpp"
#include "psdo/symbol.hpp"

namespace psdo {

struct SeminormOptions {
  int max_order = 4;       ///< largest alpha or beta accepted
  int grid_factor = 8;     ///< x-grid has grid_factor * max(F, 2) points
  bool refine = true;      ///< polish grid maxima by golden-section search
};

namespace detail {

inline double golden_max(const auto& f, double lo, double hi, double fa_guess) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best = std::max({fa_guess, fc, fd});
  while (b - a > 1e-13) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

}  // namespace detail

/// sup over x in [0, 2pi) of the spectral norm of a matrix series.
///
/// Samples an equispaced grid, then refines each of the largest sampled
/// local maxima on its neighbouring grid cells.
inline double sup_spectral_norm(const MatrixSeries& s,
                                const SeminormOptions& opts = {}) {
  if (s.is_zero()) return 0.0;
  const int n = opts.grid_factor * std::max(s.cutoff(), 2);
  const double h = 2.0 * std::numbers::pi / n;
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[i] = spectral_norm(s.evaluate(i * h));
  double best = *std::max_element(values.begin(), values.end());
  if (!opts.refine) return best;

  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    const double left = values[(i + n - 1) % n];
    const double right = values[(i + 1) % n];
    if (values[i] >= left && values[i] >= right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(),
            [&](int a, int b) { return values[a] > values[b]; });
  if (peaks.size() > 4) peaks.resize(4);
  const auto f = [&](double x) { return spectral_norm(s.evaluate(x)); };
  for (int i : peaks)
    best = std::max(best, detail::golden_max(f, (i - 1) * h, (i + 1) * h,
                                             values[i]));
  return best;
}

/// sup_{x, xi = +-1} |d_x^beta d_xi^alpha a_{-m}(x, xi)|.
inline double seminorm(const ClassicalSymbol& a, int alpha, int beta, int m,
                       const SeminormOptions& opts = {}) {
  if (m < 0 || m > a.truncation())
    throw ConfigError("seminorm: degree index m out of range");
  if (alpha < 0 || beta < 0 || alpha > opts.max_order || beta > opts.max_order)
    throw ConfigError("seminorm: derivative order out of range");
  const auto& c = a.component(-m);
  double best = 0.0;
  for (Sheet sheet : kSheets) {
    const double factor = std::abs(xi_derivative_factor(-m, sheet, alpha));
    if (factor == 0.0) continue;
    MatrixSeries s = c.sheet(sheet);
    // |d_x^beta h| = |D_x^beta h| pointwise.
    for (int i = 0; i < beta; ++i) s = s.dx();
    best = std::max(best, factor * sup_spectral_norm(s, opts));
  }
  return best;
}

/// max seminorm(a, alpha, beta, m) over alpha, beta <= max_order and all m.
inline double max_seminorm(const ClassicalSymbol& a, int max_order,
                           const SeminormOptions& opts = {}) {
  double best = 0.0;
  for (int m = 0; m <= a.truncation(); ++m) {
    const auto& c = a.component(-m);
    if (c.is_zero()) continue;
    for (Sheet sheet : kSheets) {
      MatrixSeries s = c.sheet(sheet);
      for (int beta = 0; beta <= max_order; ++beta) {
        if (beta > 0) s = s.dx();
        double largest_factor = 0.0;
        for (int alpha = 0; alpha <= max_order; ++alpha)
          largest_factor = std::max(
              largest_factor, std::abs(xi_derivative_factor(-m, sheet, alpha)));
        if (largest_factor == 0.0) continue;
        best = std::max(best, largest_factor * sup_spectral_norm(s, opts));
      }
    }
  }
  return best;
}

struct DecayGrid {
  double xi_max = 1e3;
  int points_per_decade = 32;
  int x_grid_factor = 8;
};

/// Least K with |d_xi^alpha (sigma - sigma_0)| <= K (1+|xi|)^{-1} and
/// |d_xi^alpha sigma_0| <= K, alpha <= 1, measured on a logarithmic
/// |xi| grid over [1, xi_max] and an equispaced x grid.
inline double minimal_decay_constant(const ClassicalSymbol& a,
                                     const DecayGrid& grid = {}) {
  const int nx = grid.x_grid_factor * std::max(a.cutoff(), 2);
  const double hx = 2.0 * std::numbers::pi / nx;
  const int decades = static_cast<int>(std::ceil(std::log10(grid.xi_max)));
  const int nxi = decades * grid.points_per_decade + 1;
  std::vector<double> xis(static_cast<std::size_t>(nxi));
  for (int i = 0; i < nxi; ++i)
    xis[i] = std::pow(grid.xi_max, static_cast<double>(i) / (nxi - 1));

  const int l = a.rank();
  const int kmax = a.truncation();
  double constant = 0.0;
  std::vector<Eigen::MatrixXcd> values(static_cast<std::size_t>(kmax) + 1);
  for (Sheet sheet : kSheets) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x = ix * hx;
      bool lower_nonzero = false;
      for (int p = 0; p <= kmax; ++p) {
        const auto& series = a.component(-p).sheet(sheet);
        values[p] = series.is_zero() ? Eigen::MatrixXcd::Zero(l, l)
                                     : series.evaluate(x);
        if (p > 0 && !series.is_zero()) lower_nonzero = true;
      }
      // d_xi sigma_0 vanishes identically away from xi = 0.
      constant = std::max(constant, spectral_norm(values[0]));
      if (!lower_nonzero) continue;
      for (double xi : xis) {
        for (int alpha = 0; alpha <= 1; ++alpha) {
          Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(l, l);
          for (int p = 1; p <= kmax; ++p) {
            const double f = xi_derivative_factor(-p, sheet, alpha) *
                             std::pow(xi, -p - alpha);
            m += f * values[p];
          }
          constant = std::max(constant, spectral_norm(m) * (1.0 + xi));
        }
      }
    }
  }
  return constant;
}

}  // namespace psdo
