#pragma once

// Op_1 on the circle as a finite block matrix on Fourier modes |j| <= J:
//
//   (Op(a) f)(x) = sum_j e^{ijx} psi(j) a(x, j) fhat(j),
//
// so block (k, j) is psi(j) times the x-Fourier coefficient of a(., j) at
// mode k - j. The excision psi vanishes at j = 0 and is 1 elsewhere.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "psdo/errors.hpp"
#include "psdo/linalg.hpp"
#include "psdo/symbol.hpp"

namespace psdo {

/// Index of (mode j, fibre component r) in a rank-l, cutoff-J mode vector.
inline Eigen::Index mode_index(int j, int r, int rank, int modes) {
  return static_cast<Eigen::Index>(j + modes) * rank + r;
}

struct OperatorMatrix {
  int rank = 1;
  int modes = 0;  ///< J
  Eigen::MatrixXcd data;

  OperatorMatrix() = default;
  OperatorMatrix(int rank_, int modes_)
      : rank(rank_), modes(modes_),
        data(Eigen::MatrixXcd::Zero(dimension(), dimension())) {}

  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(rank) * (2 * modes + 1);
  }

  /// l x l block mapping mode j to mode k.
  auto block(int k, int j) {
    return data.block(mode_index(k, 0, rank, modes),
                      mode_index(j, 0, rank, modes), rank, rank);
  }
  auto block(int k, int j) const {
    return data.block(mode_index(k, 0, rank, modes),
                      mode_index(j, 0, rank, modes), rank, rank);
  }

  OperatorMatrix& operator-=(const OperatorMatrix& o) {
    check(o);
    data -= o.data;
    return *this;
  }
  OperatorMatrix& operator+=(const OperatorMatrix& o) {
    check(o);
    data += o.data;
    return *this;
  }

  void check(const OperatorMatrix& o) const {
    if (o.rank != rank || o.modes != modes)
      throw ShapeError("operator matrix shape mismatch");
  }
};

inline OperatorMatrix operator*(const OperatorMatrix& a,
                                const OperatorMatrix& b) {
  a.check(b);
  OperatorMatrix out;
  out.rank = a.rank;
  out.modes = a.modes;
  out.data.noalias() = a.data * b.data;
  return out;
}

inline OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) {
  a -= b;
  return a;
}

/// Coefficients fhat(j) in C^l for |j| <= J.
struct SectionVector {
  int rank = 1;
  int modes = 0;
  Eigen::VectorXcd coeffs;

  SectionVector() = default;
  SectionVector(int rank_, int modes_)
      : rank(rank_), modes(modes_),
        coeffs(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rank_) *
                                      (2 * modes_ + 1))) {}

  Complex& at(int j, int r) { return coeffs(mode_index(j, r, rank, modes)); }
  Complex at(int j, int r) const {
    return coeffs(mode_index(j, r, rank, modes));
  }
};

/// Sobolev multiplier (1 + j^2)^{s/2} on the diagonal.
inline Eigen::VectorXd sobolev_weights(int rank, int modes, double s) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(rank) * (2 * modes + 1));
  for (int j = -modes; j <= modes; ++j)
    for (int r = 0; r < rank; ++r)
      w(mode_index(j, r, rank, modes)) =
          std::pow(1.0 + static_cast<double>(j) * j, 0.5 * s);
  return w;
}

/// |f|_s^2 = 2 pi sum_j (1 + j^2)^s |fhat(j)|^2 (volume 2 pi for the circle).
inline double sobolev_norm(const SectionVector& f, double s) {
  double acc = 0.0;
  for (int j = -f.modes; j <= f.modes; ++j) {
    const double w = std::pow(1.0 + static_cast<double>(j) * j, s);
    for (int r = 0; r < f.rank; ++r) acc += w * std::norm(f.at(j, r));
  }
  return std::sqrt(2.0 * std::numbers::pi * acc);
}

/// Matrix of Op_1(a) on modes |j| <= J. Requires J >= F.
inline OperatorMatrix quantize(const ClassicalSymbol& a, int modes) {
  if (modes < a.cutoff())
    throw ConfigError("quantize: mode cutoff J=" + std::to_string(modes) +
                      " is below symbol cutoff F=" +
                      std::to_string(a.cutoff()));
  const int l = a.rank();
  const int f = a.cutoff();
  OperatorMatrix op(l, modes);
  for (int j = -modes; j <= modes; ++j) {
    if (j == 0) continue;  // psi(0) = 0
    const Sheet sheet = j > 0 ? Sheet::Plus : Sheet::Minus;
    const double abs_j = std::abs(j);
    for (int p = 0; p <= a.truncation(); ++p) {
      const auto& series = a.component(-p).sheet(sheet);
      if (series.is_zero()) continue;
      const double scale = std::pow(abs_j, -p);
      for (int q = -f; q <= f; ++q) {
        const int k = j + q;
        if (k < -modes || k > modes) continue;
        const Complex* c = series.block(q);
        auto blk = op.block(k, j);
        for (int r = 0; r < l; ++r)
          for (int s = 0; s < l; ++s) blk(r, s) += scale * c[r * l + s];
      }
    }
  }
  return op;
}

/// Largest singular value of D_{s_to} A D_{s_from}^{-1}.
inline double operator_norm(const OperatorMatrix& a, double s_from,
                            double s_to,
                            const PowerIterationOptions& opts = {}) {
  const Eigen::VectorXd to = sobolev_weights(a.rank, a.modes, s_to);
  const Eigen::VectorXd from = sobolev_weights(a.rank, a.modes, s_from);
  const Eigen::MatrixXcd b =
      to.asDiagonal() * a.data * from.cwiseInverse().asDiagonal();
  return largest_singular_value(b, opts);
}

/// Op(a) Op(b) - Op(a # b).
inline OperatorMatrix composition_defect(const ClassicalSymbol& a,
                                         const ClassicalSymbol& b,
                                         int truncation, int modes) {
  OperatorMatrix product = quantize(a, modes) * quantize(b, modes);
  product -= quantize(compose(a, b, truncation), modes);
  return product;
}

/// The columns of A for input modes lo <= |j| <= hi, all rows kept.
inline Eigen::MatrixXcd band_columns(const OperatorMatrix& a, int lo, int hi) {
  int count = 0;
  for (int j = -a.modes; j <= a.modes; ++j)
    if (std::abs(j) >= lo && std::abs(j) <= hi) ++count;
  Eigen::MatrixXcd out(a.dimension(), static_cast<Eigen::Index>(count) * a.rank);
  Eigen::Index col = 0;
  for (int j = -a.modes; j <= a.modes; ++j) {
    if (std::abs(j) < lo || std::abs(j) > hi) continue;
    out.middleCols(col, a.rank) =
        a.data.middleCols(mode_index(j, 0, a.rank, a.modes), a.rank);
    col += a.rank;
  }
  return out;
}

/// L^2 norm of the defect restricted to input modes J/4 <= |j| <= J/2,
/// away from the excision at j = 0 and the truncation edge at |j| = J.
inline double mid_band_defect_norm(const OperatorMatrix& defect,
                                   const PowerIterationOptions& opts = {}) {
  return largest_singular_value(
      band_columns(defect, defect.modes / 4, defect.modes / 2), opts);
}

// Binary matrix dump, little-endian:
//   8 bytes  magic "PSDOMAT1"
//   int32    rank
//   int32    J
//   int64    n = rank (2J + 1)
//   n*n pairs of float64 (re, im), row-major
// Row index is mode_index(k, r), column index is mode_index(j, s).

namespace detail {

template <class T>
void write_le(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw FormatError("truncated matrix dump");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_matrix(std::ostream& out, const OperatorMatrix& a) {
  out.write("PSDOMAT1", 8);
  detail::write_le<std::int32_t>(out, a.rank);
  detail::write_le<std::int32_t>(out, a.modes);
  const std::int64_t n = a.dimension();
  detail::write_le<std::int64_t>(out, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      detail::write_le<double>(out, a.data(r, c).real());
      detail::write_le<double>(out, a.data(r, c).imag());
    }
}

inline OperatorMatrix read_matrix(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::string(magic, 8) != "PSDOMAT1")
    throw FormatError("not a matrix dump");
  const auto rank = detail::read_le<std::int32_t>(in);
  const auto modes = detail::read_le<std::int32_t>(in);
  const auto n = detail::read_le<std::int64_t>(in);
  if (rank < 1 || modes < 0 ||
      n != static_cast<std::int64_t>(rank) * (2 * modes + 1))
    throw FormatError("inconsistent matrix dump header");
  OperatorMatrix a(rank, modes);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = detail::read_le<double>(in);
      const double im = detail::read_le<double>(in);
      a.data(r, c) = {re, im};
    }
  return a;
}

}  // namespace psdo
