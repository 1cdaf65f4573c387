#pragma once

// Truncated classical symbol algebra on the circle.
//
// A homogeneous component of degree m <= 0 is stored by its restrictions to
// the two points of the cosphere over each x, i.e. the sheets xi > 0 and
// xi < 0:  h(x, xi) = h_{sgn xi}(x) |xi|^m.  Each sheet is an l x l matrix
// valued trigonometric polynomial with modes |k| <= F.
//
// Only the circle is implemented. Higher-dimensional bases would replace the
// two-sheet storage by functions on the unit cosphere; everything above
// HomogeneousComponent is written against degree/sheet accessors only.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psdo/errors.hpp"

namespace psdo {

using Complex = std::complex<double>;

enum class Sheet { Plus, Minus };

inline constexpr Sheet kSheets[] = {Sheet::Plus, Sheet::Minus};

namespace detail {

// Textbook complex product. std::complex's operator* also handles
// inf/nan recovery, which costs a library call per product in hot loops.
inline Complex cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

/// l x l matrix valued trigonometric polynomial  sum_{|k|<=F} c_k e^{ikx}.
class MatrixSeries {
 public:
  MatrixSeries() : MatrixSeries(1, 0) {}
  MatrixSeries(int rank, int cutoff) : rank_(rank), cutoff_(cutoff) {
    if (rank < 1) throw ShapeError("rank must be >= 1");
    if (cutoff < 0) throw ShapeError("mode cutoff must be >= 0");
    coeffs_.assign(static_cast<std::size_t>(2 * cutoff + 1) * rank * rank,
                   Complex{});
  }

  /// Constant series equal to `value` (l x l).
  static MatrixSeries constant(const Eigen::MatrixXcd& value, int cutoff) {
    MatrixSeries s(static_cast<int>(value.rows()), cutoff);
    s.set_coefficient(0, value);
    return s;
  }

  /// Scalar multiple of the identity carried by a single Fourier mode.
  static MatrixSeries mode(int rank, int cutoff, int k, Complex value) {
    MatrixSeries s(rank, cutoff);
    for (int r = 0; r < rank; ++r) s.at(k, r, r) = value;
    return s;
  }

  int rank() const noexcept { return rank_; }
  int cutoff() const noexcept { return cutoff_; }

  Complex& at(int k, int row, int col) { return coeffs_[offset(k, row, col)]; }
  const Complex& at(int k, int row, int col) const {
    return coeffs_[offset(k, row, col)];
  }

  std::span<const Complex> data() const noexcept { return coeffs_; }
  std::span<Complex> data() noexcept { return coeffs_; }

  /// Pointer to the row-major l x l block of mode k.
  const Complex* block(int k) const {
    return coeffs_.data() + offset(k, 0, 0);
  }
  Complex* block(int k) { return coeffs_.data() + offset(k, 0, 0); }

  Eigen::MatrixXcd coefficient(int k) const {
    Eigen::MatrixXcd m(rank_, rank_);
    for (int r = 0; r < rank_; ++r)
      for (int c = 0; c < rank_; ++c) m(r, c) = at(k, r, c);
    return m;
  }

  void set_coefficient(int k, const Eigen::MatrixXcd& value) {
    if (value.rows() != rank_ || value.cols() != rank_)
      throw ShapeError("coefficient block has wrong size");
    for (int r = 0; r < rank_; ++r)
      for (int c = 0; c < rank_; ++c) at(k, r, c) = value(r, c);
  }

  Eigen::MatrixXcd evaluate(double x) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rank_, rank_);
    for (int k = -cutoff_; k <= cutoff_; ++k) {
      const Complex phase = std::polar(1.0, k * x);
      const Complex* b = block(k);
      for (int r = 0; r < rank_; ++r)
        for (int c = 0; c < rank_; ++c) m(r, c) += b[r * rank_ + c] * phase;
    }
    return m;
  }

  bool is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const Complex& z) { return z == Complex{}; });
  }

  /// Trace of the zeroth Fourier coefficient, i.e. (1/2pi) int tr h dx.
  Complex mean_trace() const {
    Complex t{};
    for (int r = 0; r < rank_; ++r) t += at(0, r, r);
    return t;
  }

  /// D_x = -i d/dx acting as c_k -> k c_k.
  MatrixSeries dx() const {
    MatrixSeries out = *this;
    for (int k = -cutoff_; k <= cutoff_; ++k) {
      Complex* b = out.block(k);
      for (int e = 0; e < rank_ * rank_; ++e) b[e] *= static_cast<double>(k);
    }
    return out;
  }

  /// Pointwise conjugate transpose: coefficient k becomes c_{-k}^dagger.
  MatrixSeries adjoint() const {
    MatrixSeries out(rank_, cutoff_);
    for (int k = -cutoff_; k <= cutoff_; ++k)
      for (int r = 0; r < rank_; ++r)
        for (int c = 0; c < rank_; ++c)
          out.at(k, r, c) = std::conj(at(-k, c, r));
    return out;
  }

  MatrixSeries& operator+=(const MatrixSeries& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      coeffs_[i] += other.coeffs_[i];
    return *this;
  }
  MatrixSeries& operator-=(const MatrixSeries& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      coeffs_[i] -= other.coeffs_[i];
    return *this;
  }
  MatrixSeries& operator*=(Complex s) {
    for (auto& z : coeffs_) z *= s;
    return *this;
  }

  /// this += scale * other
  void add_scaled(Complex scale, const MatrixSeries& other) {
    check_same_shape(other);
    if (scale.imag() == 0.0) {
      const double re = scale.real();
      for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] += re * other.coeffs_[i];
      return;
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      coeffs_[i] += detail::cmul(scale, other.coeffs_[i]);
  }

  /// this += scale * (lhs * rhs) with the product truncated at this cutoff.
  /// Modes of rhs are weighted by k^rhs_dx_power, which applies D_x^n to rhs
  /// without materializing it.
  void add_product(Complex scale, const MatrixSeries& lhs,
                   const MatrixSeries& rhs, int rhs_dx_power = 0) {
    check_same_shape(lhs);
    check_same_shape(rhs);
    const int l = rank_;
    const int f = cutoff_;
    std::vector<Complex> weighted(static_cast<std::size_t>(2 * f + 1));
    for (int q = -f; q <= f; ++q)
      weighted[q + f] = scale * std::pow(static_cast<double>(q), rhs_dx_power);
    for (int k = -f; k <= f; ++k) {
      Complex* out = block(k);
      const int p_lo = std::max(-f, k - f);
      const int p_hi = std::min(f, k + f);
      for (int p = p_lo; p <= p_hi; ++p) {
        const int q = k - p;
        const Complex w = weighted[q + f];
        if (w == Complex{}) continue;
        const Complex* a = lhs.block(p);
        const Complex* b = rhs.block(q);
        for (int r = 0; r < l; ++r)
          for (int s = 0; s < l; ++s) {
            const Complex ars = detail::cmul(a[r * l + s], w);
            if (ars == Complex{}) continue;
            const Complex* brow = b + s * l;
            Complex* orow = out + r * l;
            for (int c = 0; c < l; ++c) orow[c] += detail::cmul(ars, brow[c]);
          }
      }
    }
  }

  friend bool operator==(const MatrixSeries&, const MatrixSeries&) = default;

 private:
  std::size_t offset(int k, int row, int col) const {
    return (static_cast<std::size_t>(k + cutoff_) * rank_ + row) * rank_ + col;
  }

  void check_same_shape(const MatrixSeries& other) const {
    if (other.rank_ != rank_) throw ShapeError("matrix series rank mismatch");
    if (other.cutoff_ != cutoff_)
      throw ShapeError("matrix series cutoff mismatch");
  }

  int rank_;
  int cutoff_;
  std::vector<Complex> coeffs_;
};

inline MatrixSeries operator+(MatrixSeries a, const MatrixSeries& b) {
  a += b;
  return a;
}
inline MatrixSeries operator-(MatrixSeries a, const MatrixSeries& b) {
  a -= b;
  return a;
}
inline MatrixSeries operator*(Complex s, MatrixSeries a) {
  a *= s;
  return a;
}

/// Product of two series, truncated at the common cutoff.
inline MatrixSeries multiply(const MatrixSeries& a, const MatrixSeries& b) {
  MatrixSeries out(a.rank(), a.cutoff());
  out.add_product(1.0, a, b);
  return out;
}

/// Multiplier picked up by the sheet of a degree-m component under d/dxi:
/// d/dxi [h(x) |xi|^m] = sgn(xi) m h(x) |xi|^(m-1).
inline double xi_derivative_factor(int degree, Sheet sheet) {
  return sheet == Sheet::Plus ? degree : -degree;
}

/// Factor for d^n/dxi^n: falling factorial m(m-1)...(m-n+1), sign (+-1)^n.
inline double xi_derivative_factor(int degree, Sheet sheet, int order) {
  double f = 1.0;
  for (int i = 0; i < order; ++i)
    f *= xi_derivative_factor(degree - i, sheet);
  return f;
}

class HomogeneousComponent {
 public:
  HomogeneousComponent() = default;
  HomogeneousComponent(int degree, int rank, int cutoff)
      : degree_(degree), plus_(rank, cutoff), minus_(rank, cutoff) {}
  HomogeneousComponent(int degree, MatrixSeries plus, MatrixSeries minus)
      : degree_(degree), plus_(std::move(plus)), minus_(std::move(minus)) {
    if (plus_.rank() != minus_.rank() || plus_.cutoff() != minus_.cutoff())
      throw ShapeError("sheets of a component must share rank and cutoff");
  }

  int degree() const noexcept { return degree_; }
  int rank() const noexcept { return plus_.rank(); }
  int cutoff() const noexcept { return plus_.cutoff(); }

  const MatrixSeries& sheet(Sheet s) const {
    return s == Sheet::Plus ? plus_ : minus_;
  }
  MatrixSeries& sheet(Sheet s) { return s == Sheet::Plus ? plus_ : minus_; }

  bool is_zero() const { return plus_.is_zero() && minus_.is_zero(); }

  /// h(x, xi) = h_{sgn xi}(x) |xi|^m, for xi != 0.
  Eigen::MatrixXcd evaluate(double x, double xi) const {
    if (xi == 0.0) throw ConfigError("homogeneous symbol evaluated at xi = 0");
    const Sheet s = xi > 0 ? Sheet::Plus : Sheet::Minus;
    return sheet(s).evaluate(x) * std::pow(std::abs(xi), degree_);
  }

  friend bool operator==(const HomogeneousComponent&,
                         const HomogeneousComponent&) = default;

 private:
  int degree_ = 0;
  MatrixSeries plus_;
  MatrixSeries minus_;
};

/// Degree m-1 component of d/dxi.
inline HomogeneousComponent xi_derivative(const HomogeneousComponent& c) {
  HomogeneousComponent out(c.degree() - 1, c.sheet(Sheet::Plus),
                           c.sheet(Sheet::Minus));
  for (Sheet s : kSheets) out.sheet(s) *= xi_derivative_factor(c.degree(), s);
  return out;
}

/// D_x = -i d/dx on both sheets; degree unchanged.
inline HomogeneousComponent x_derivative(const HomogeneousComponent& c) {
  return {c.degree(), c.sheet(Sheet::Plus).dx(), c.sheet(Sheet::Minus).dx()};
}

/// Truncated asymptotic sum  a ~ a_0 + a_{-1} + ... + a_{-K}.
///
/// Components are stored densely by -degree; a degree with no data is an
/// all-zero component.
class ClassicalSymbol {
 public:
  ClassicalSymbol() : ClassicalSymbol(1, 0, 0) {}
  ClassicalSymbol(int rank, int truncation, int cutoff)
      : rank_(rank), truncation_(truncation), cutoff_(cutoff) {
    if (truncation < 0) throw ConfigError("truncation order must be >= 0");
    components_.reserve(static_cast<std::size_t>(truncation) + 1);
    for (int p = 0; p <= truncation; ++p)
      components_.emplace_back(-p, rank, cutoff);
  }

  /// sigma_0 = value, constant in x, identical on both sheets.
  static ClassicalSymbol multiplication(const Eigen::MatrixXcd& value,
                                        int truncation, int cutoff) {
    ClassicalSymbol a(static_cast<int>(value.rows()), truncation, cutoff);
    for (Sheet s : kSheets)
      a.component(0).sheet(s) = MatrixSeries::constant(value, cutoff);
    return a;
  }

  static ClassicalSymbol identity(int rank, int truncation, int cutoff) {
    return multiplication(Eigen::MatrixXcd::Identity(rank, rank), truncation,
                          cutoff);
  }

  int rank() const noexcept { return rank_; }
  int truncation() const noexcept { return truncation_; }
  int cutoff() const noexcept { return cutoff_; }

  /// Component of the given degree in [-K, 0].
  const HomogeneousComponent& component(int degree) const {
    return components_.at(index_of(degree));
  }
  HomogeneousComponent& component(int degree) {
    return components_.at(index_of(degree));
  }

  void set_component(const HomogeneousComponent& c) {
    if (c.rank() != rank_ || c.cutoff() != cutoff_)
      throw ShapeError("component shape does not match symbol");
    components_.at(index_of(c.degree())) = c;
  }

  bool is_zero() const {
    return std::all_of(components_.begin(), components_.end(),
                       [](const auto& c) { return c.is_zero(); });
  }

  /// Sum of all retained components at (x, xi).
  Eigen::MatrixXcd evaluate(double x, double xi) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rank_, rank_);
    for (const auto& c : components_) m += c.evaluate(x, xi);
    return m;
  }

  ClassicalSymbol& operator+=(const ClassicalSymbol& other) {
    add_scaled(1.0, other);
    return *this;
  }
  ClassicalSymbol& operator-=(const ClassicalSymbol& other) {
    add_scaled(-1.0, other);
    return *this;
  }
  ClassicalSymbol& operator*=(Complex s) {
    for (auto& c : components_)
      for (Sheet sh : kSheets) c.sheet(sh) *= s;
    return *this;
  }

  /// this += scale * other; truncation grows to cover both.
  void add_scaled(Complex scale, const ClassicalSymbol& other) {
    check_compatible(other);
    if (other.truncation_ > truncation_) extend_truncation(other.truncation_);
    for (int p = 0; p <= other.truncation_; ++p)
      for (Sheet sh : kSheets)
        components_[p].sheet(sh).add_scaled(scale,
                                            other.components_[p].sheet(sh));
  }

  void check_compatible(const ClassicalSymbol& other) const {
    if (other.rank_ != rank_) throw ShapeError("symbol rank mismatch");
    if (other.cutoff_ != cutoff_) throw ShapeError("symbol cutoff mismatch");
  }

  void extend_truncation(int truncation) {
    for (int p = truncation_ + 1; p <= truncation; ++p)
      components_.emplace_back(-p, rank_, cutoff_);
    truncation_ = std::max(truncation_, truncation);
  }

  friend bool operator==(const ClassicalSymbol&,
                         const ClassicalSymbol&) = default;

 private:
  std::size_t index_of(int degree) const {
    if (degree > 0 || -degree > truncation_)
      throw ConfigError("degree " + std::to_string(degree) +
                        " outside retained range [-" +
                        std::to_string(truncation_) + ", 0]");
    return static_cast<std::size_t>(-degree);
  }

  int rank_;
  int truncation_;
  int cutoff_;
  std::vector<HomogeneousComponent> components_;
};

inline ClassicalSymbol operator+(ClassicalSymbol a, const ClassicalSymbol& b) {
  a += b;
  return a;
}
inline ClassicalSymbol operator-(ClassicalSymbol a, const ClassicalSymbol& b) {
  a -= b;
  return a;
}
inline ClassicalSymbol operator*(Complex s, ClassicalSymbol a) {
  a *= s;
  return a;
}

/// sum_i coeffs[i] * symbols[i]; truncation is the max of the inputs.
inline ClassicalSymbol linear_combine(std::span<const Complex> coeffs,
                                      std::span<const ClassicalSymbol> symbols) {
  if (coeffs.size() != symbols.size())
    throw ShapeError("linear_combine: coefficient and symbol counts differ");
  if (symbols.empty())
    throw ShapeError("linear_combine: at least one symbol is required");
  int truncation = 0;
  for (const auto& s : symbols) {
    symbols.front().check_compatible(s);
    truncation = std::max(truncation, s.truncation());
  }
  ClassicalSymbol out(symbols.front().rank(), truncation,
                      symbols.front().cutoff());
  for (std::size_t i = 0; i < symbols.size(); ++i)
    out.add_scaled(coeffs[i], symbols[i]);
  return out;
}

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline void check_truncation(int requested, int available) {
  if (requested < 0) throw ConfigError("truncation order must be >= 0");
  if (requested > available)
    throw ConfigError("requested truncation " + std::to_string(requested) +
                      " exceeds retained order " + std::to_string(available));
}

}  // namespace detail

/// Asymptotic composition  (a # b) ~ sum_k (1/k!) d_xi^k a  D_x^k b,
/// keeping degrees >= -K. Products are truncated at the common cutoff F.
inline ClassicalSymbol compose(const ClassicalSymbol& a,
                               const ClassicalSymbol& b, int truncation) {
  a.check_compatible(b);
  detail::check_truncation(truncation,
                           std::min(a.truncation(), b.truncation()));
  ClassicalSymbol out(a.rank(), truncation, a.cutoff());
  for (int pa = 0; pa <= truncation; ++pa) {
    const auto& ca = a.component(-pa);
    if (ca.is_zero()) continue;
    for (int pb = 0; pa + pb <= truncation; ++pb) {
      const auto& cb = b.component(-pb);
      if (cb.is_zero()) continue;
      for (int k = 0; pa + pb + k <= truncation; ++k) {
        // d_xi^k kills degree-0 components for k >= 1.
        if (k > 0 && pa == 0) break;
        auto& target = out.component(-(pa + pb + k));
        for (Sheet s : kSheets) {
          const double w =
              xi_derivative_factor(-pa, s, k) / detail::factorial(k);
          if (w == 0.0) continue;
          target.sheet(s).add_product(w, ca.sheet(s), cb.sheet(s), k);
        }
      }
    }
  }
  return out;
}

/// Formal adjoint  a* ~ sum_k (1/k!) d_xi^k D_x^k a^dagger.
inline ClassicalSymbol adjoint(const ClassicalSymbol& a, int truncation) {
  detail::check_truncation(truncation, a.truncation());
  ClassicalSymbol out(a.rank(), truncation, a.cutoff());
  for (int pa = 0; pa <= truncation; ++pa) {
    const auto& ca = a.component(-pa);
    if (ca.is_zero()) continue;
    for (Sheet s : kSheets) {
      MatrixSeries term = ca.sheet(s).adjoint();
      for (int k = 0; pa + k <= truncation; ++k) {
        if (k > 0) term = term.dx();
        const double w = xi_derivative_factor(-pa, s, k) / detail::factorial(k);
        if (w == 0.0) break;
        out.component(-(pa + k)).sheet(s).add_scaled(w, term);
      }
    }
  }
  return out;
}

/// Copy of a keeping only degrees >= -K (K may exceed a's truncation).
inline ClassicalSymbol truncated(const ClassicalSymbol& a, int truncation) {
  if (truncation < 0) throw ConfigError("truncation order must be >= 0");
  ClassicalSymbol out(a.rank(), truncation, a.cutoff());
  for (int p = 0; p <= std::min(truncation, a.truncation()); ++p)
    out.set_component(a.component(-p));
  return out;
}

/// a # b - b # a.
inline ClassicalSymbol commutator(const ClassicalSymbol& a,
                                  const ClassicalSymbol& b, int truncation) {
  ClassicalSymbol out = compose(a, b, truncation);
  out -= compose(b, a, truncation);
  return out;
}

}  // namespace psdo
