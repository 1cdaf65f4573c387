#pragma once

// Built-in bundles, connections and loop sections.

#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "psdo/errors.hpp"
#include "psdo/forms.hpp"
#include "psdo/random.hpp"
#include "psdo/symbol.hpp"
#include "psdo/traces.hpp"

namespace psdo {

// ---------------------------------------------------------------------------
// Random symbols

/// Decay envelope of the x-Fourier coefficients of random symbols.
inline double fourier_envelope(int k) { return std::exp(-std::abs(k) / 4.0); }

struct RandomSymbolOptions {
  bool include_degree_zero = true;
  int bandwidth = -1;  ///< highest populated mode; -1 means the cutoff F
};

/// Entries are circular complex normals times e^{-|k|/4} / Z, with
/// Z = sum_{|k|<=F} e^{-|k|/4}, so each sheet's sup norm is O(1).
inline ClassicalSymbol random_symbol(Rng& rng, int rank, int truncation,
                                     int cutoff,
                                     const RandomSymbolOptions& opts = {}) {
  const int band = opts.bandwidth < 0 ? cutoff : std::min(opts.bandwidth, cutoff);
  double z = 0.0;
  for (int k = -cutoff; k <= cutoff; ++k) z += fourier_envelope(k);
  ClassicalSymbol a(rank, truncation, cutoff);
  for (int p = opts.include_degree_zero ? 0 : 1; p <= truncation; ++p)
    for (Sheet s : kSheets) {
      auto& series = a.component(-p).sheet(s);
      for (int k = -band; k <= band; ++k) {
        const double env = fourier_envelope(k) / z;
        for (int r = 0; r < rank; ++r)
          for (int c = 0; c < rank; ++c)
            series.at(k, r, c) = env * rng.complex_normal();
      }
    }
  return a;
}

// ---------------------------------------------------------------------------
// Monopole and constant-loop pullback

/// Curvature of the round connection on the degree-m line bundle over S^2:
/// Omega_{theta phi} = (-i m / 2) sin(theta), as a multiplication symbol.
inline SymbolFormField monopole_field(int m, std::shared_ptr<const Cycle> cycle,
                                      int truncation = 0, int cutoff = 0) {
  if (!cycle || cycle->kind() != CycleKind::Sphere)
    throw ConfigError("monopole_field needs a sphere cycle");
  return {cycle, 2, 1, truncation, cutoff,
          [m, cycle, truncation, cutoff](std::size_t p, int) {
            const double theta = cycle->coordinate(0, cycle->multi_index(p)[0]);
            Eigen::MatrixXcd v(1, 1);
            v(0, 0) = Complex(0.0, -0.5 * m) * std::sin(theta);
            return ClassicalSymbol::multiplication(v, truncation, cutoff);
          }};
}

namespace detail {

/// The l x l value of a symbol that is pure degree 0 and constant in (x, xi).
inline Eigen::MatrixXcd multiplication_value(const ClassicalSymbol& a) {
  for (int p = 1; p <= a.truncation(); ++p)
    if (!a.component(-p).is_zero())
      throw ConfigError(
          "pullback: base curvature has lower-order components; a finite-rank "
          "connection pulls back to a multiplication operator");
  const auto& c = a.component(0);
  const auto& plus = c.sheet(Sheet::Plus);
  if (!(plus == c.sheet(Sheet::Minus)))
    throw ConfigError("pullback: base curvature depends on the cosphere sheet");
  for (int k = -a.cutoff(); k <= a.cutoff(); ++k) {
    if (k == 0) continue;
    for (int r = 0; r < a.rank(); ++r)
      for (int s = 0; s < a.rank(); ++s)
        if (plus.at(k, r, s) != Complex{})
          throw ConfigError("pullback: base curvature depends on x");
  }
  return plus.coefficient(0);
}

}  // namespace detail

/// Curvature of ev^* of a finite-rank connection, restricted to the
/// constant-loop cycle i(M) in Maps(S^1, M): at each point, multiplication by
/// the base curvature value, constant along the loop.
inline SymbolFormField pullback_gauge_field(const SymbolFormField& base) {
  if (base.form_degree() != 2)
    throw ConfigError("pullback_gauge_field needs a curvature 2-form");
  const Cycle& cyc = base.cycle();
  for (std::size_t p = 0; p < cyc.size(); ++p)
    for (int s = 0; s < base.slot_count(); ++s)
      detail::multiplication_value(base.at(p, s));
  auto loops = std::make_shared<const Cycle>(
      cyc.relabelled("constant-loops(" + cyc.label() + ")"));
  const int truncation = base.truncation();
  const int cutoff = base.cutoff();
  return {loops, 2, base.rank(), truncation, cutoff,
          [base, truncation, cutoff](std::size_t p, int slot) {
            return ClassicalSymbol::multiplication(
                detail::multiplication_value(base.at(p, slot)), truncation,
                cutoff);
          }};
}

/// <tr(Omega^k), cycle> for a field of finite-rank curvature matrices, using
/// the fibre trace only (no integration over the cosphere).
inline Complex finite_rank_pairing(const SymbolFormField& field, int k,
                                   const PairingOptions& opts = {}) {
  if (field.form_degree() != 2)
    throw ConfigError("finite_rank_pairing needs a curvature 2-form");
  if (field.cycle().dimension() != 2 * k)
    throw ShapeError("finite_rank_pairing: cycle dimension must be 2k");
  const auto terms = wedge_power_terms(k);
  const Cycle& cyc = field.cycle();
  detail::Accumulator acc(opts.compensated);
  for (std::size_t p = 0; p < cyc.size(); ++p) {
    std::vector<Eigen::MatrixXcd> omega;
    for (int s = 0; s < field.slot_count(); ++s)
      omega.push_back(detail::multiplication_value(field.at(p, s)));
    Complex v{};
    for (const auto& t : terms) {
      Eigen::MatrixXcd prod = omega[static_cast<std::size_t>(t.slots[0])];
      for (std::size_t i = 1; i < t.slots.size(); ++i)
        prod = prod * omega[static_cast<std::size_t>(t.slots[i])];
      v += static_cast<double>(t.sign) * prod.trace();
    }
    acc.add(v * (cyc.weight(p) / cyc.density(p)));
  }
  return acc.value();
}

/// Chern-Weil normalization (i / 2pi)^k, divided by vol(S*S^1) to undo the
/// cosphere integral of the leading-order trace.
inline Complex chern_weil_normalization(int k) {
  return std::pow(Complex(0.0, 1.0 / (2.0 * std::numbers::pi)), k) /
         kCosphereVolume;
}

/// Alternative reading 1 / (vol(S*S^1) (2 pi i)^k). Differs from the
/// Chern-Weil one by (-1)^k.
inline Complex integral_lattice_normalization(int k) {
  return 1.0 / (kCosphereVolume *
                std::pow(Complex(0.0, 2.0 * std::numbers::pi), k));
}

// ---------------------------------------------------------------------------
// Random connections with values in order <= -1 symbols

struct RandomConnectionInfo {
  static constexpr int kBaseModes = 8;
  static constexpr double kEnvelopeScale = 4.0;  ///< e^{-|k|/4}
};

namespace detail {

/// Eight smooth functions on S^2 in embedding coordinates (degree 1 and 2
/// harmonics) and their partial derivatives in (theta, phi).
struct SphereBasis {
  std::array<double, 8> g;
  std::array<double, 3> dx_dtheta, dx_dphi;  // d X_a / d u
};

inline SphereBasis sphere_basis(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double x = st * cp, y = st * sp, z = ct;
  SphereBasis b{};
  b.g = {x, y, z, x * y, y * z, z * x, x * x - y * y, 3.0 * z * z - 1.0};
  b.dx_dtheta = {ct * cp, ct * sp, -st};
  b.dx_dphi = {-st * sp, st * cp, 0.0};
  return b;
}

}  // namespace detail

/// Deterministic random connection 1-form with zero degree-0 part.
///
/// Sphere: theta = sum_{a,b} g_b(X) S_{ab} dX_a with X the embedding in R^3,
/// g_b the eight basis functions above and S_{ab} random symbols; this is a
/// smooth global form on S^2. Torus: theta_mu = sum_b g_b(u) S_{mu b} with
/// g_b = cos/sin of four seeded integer wave vectors.
inline SymbolFormField random_negative_order_connection(
    std::uint64_t seed, std::shared_ptr<const Cycle> cycle, int truncation,
    int cutoff, int rank) {
  if (!cycle) throw ConfigError("random connection needs a cycle");
  if (truncation < 1)
    throw ConfigError("negative-order connection needs truncation >= 1");
  Rng rng(seed);
  RandomSymbolOptions opts;
  opts.include_degree_zero = false;
  const int dim = cycle->dimension();

  if (cycle->kind() == CycleKind::Sphere) {
    auto basis = std::make_shared<std::vector<ClassicalSymbol>>();
    for (int i = 0; i < 3 * RandomConnectionInfo::kBaseModes; ++i)
      basis->push_back(random_symbol(rng, rank, truncation, cutoff, opts));
    return {cycle, 1, rank, truncation, cutoff,
            [cycle, basis, rank, truncation, cutoff](std::size_t p, int mu) {
              const auto u = cycle->coordinates(p);
              const auto b = detail::sphere_basis(u[0], u[1]);
              const auto& dx = mu == 0 ? b.dx_dtheta : b.dx_dphi;
              ClassicalSymbol out(rank, truncation, cutoff);
              for (int a = 0; a < 3; ++a) {
                if (dx[a] == 0.0) continue;
                for (int g = 0; g < RandomConnectionInfo::kBaseModes; ++g)
                  out.add_scaled(dx[a] * b.g[g],
                                 (*basis)[a * RandomConnectionInfo::kBaseModes + g]);
              }
              return out;
            }};
  }

  // Torus: four wave vectors with entries in {-1, 0, 1}, not all zero.
  auto waves = std::make_shared<std::vector<std::vector<int>>>();
  while (waves->size() < RandomConnectionInfo::kBaseModes / 2) {
    std::vector<int> w(static_cast<std::size_t>(dim));
    bool nonzero = false;
    for (auto& c : w) {
      c = static_cast<int>(rng.split() % 3) - 1;
      nonzero = nonzero || c != 0;
    }
    if (nonzero) waves->push_back(std::move(w));
  }
  auto basis = std::make_shared<std::vector<ClassicalSymbol>>();
  for (int i = 0; i < dim * RandomConnectionInfo::kBaseModes; ++i)
    basis->push_back(random_symbol(rng, rank, truncation, cutoff, opts));
  return {cycle, 1, rank, truncation, cutoff,
          [cycle, waves, basis, rank, truncation, cutoff](std::size_t p,
                                                          int mu) {
            const auto u = cycle->coordinates(p);
            ClassicalSymbol out(rank, truncation, cutoff);
            for (std::size_t w = 0; w < waves->size(); ++w) {
              double phase = 0.0;
              for (std::size_t a = 0; a < u.size(); ++a)
                phase += (*waves)[w][a] * u[a];
              const auto base = static_cast<std::size_t>(mu) *
                                    RandomConnectionInfo::kBaseModes +
                                2 * w;
              out.add_scaled(std::cos(phase), (*basis)[base]);
              out.add_scaled(std::sin(phase), (*basis)[base + 1]);
            }
            return out;
          }};
}

// ---------------------------------------------------------------------------
// Loop sections and the Sobolev metric on Maps(S^1, M), flat target

/// Values X(t_n), t_n = 2 pi n / N, N = 2^q with q >= 6; row-major [n][r].
class LoopSection {
 public:
  LoopSection(int rank, std::vector<Complex> values)
      : rank_(rank), values_(std::move(values)) {
    if (rank < 1) throw ShapeError("loop section rank must be >= 1");
    if (values_.size() % static_cast<std::size_t>(rank) != 0)
      throw ShapeError("loop section values do not match rank");
    const std::size_t n = values_.size() / static_cast<std::size_t>(rank);
    if (n < 64 || (n & (n - 1)) != 0)
      throw ConfigError("loop section needs 2^q samples with q >= 6");
    for (const auto& z : values_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ConfigError("loop section has non-finite samples");
  }

  template <class F>
  static LoopSection sample(int rank, int samples, F&& f) {
    std::vector<Complex> v;
    v.reserve(static_cast<std::size_t>(rank) * samples);
    for (int n = 0; n < samples; ++n) {
      const double t = 2.0 * std::numbers::pi * n / samples;
      for (int r = 0; r < rank; ++r) v.push_back(f(t, r));
    }
    return {rank, std::move(v)};
  }

  int rank() const noexcept { return rank_; }
  int samples() const noexcept {
    return static_cast<int>(values_.size()) / rank_;
  }
  Complex value(int n, int r) const {
    return values_[static_cast<std::size_t>(n) * rank_ + r];
  }

  /// Fourier coefficients Xhat(j) = (1/N) sum_n X(t_n) e^{-ij t_n} of one
  /// component, in FFT order (index n holds mode n for n <= N/2, else n - N).
  std::vector<Complex> fourier(int r) const {
    std::vector<Complex> in(static_cast<std::size_t>(samples()));
    for (int n = 0; n < samples(); ++n) in[n] = value(n, r);
    std::vector<Complex> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    for (auto& z : out) z /= static_cast<double>(samples());
    return out;
  }

 private:
  int rank_;
  std::vector<Complex> values_;
};

/// <X, Y>_s = int_0^{2pi} <X, (1 + Delta)^s Y> dt with Delta = -d^2/dt^2,
/// conjugate-linear in X: 2 pi sum_j (1 + j^2)^s conj(Xhat(j)) . Yhat(j).
inline Complex loop_metric(const LoopSection& x, const LoopSection& y, int s) {
  if (x.samples() != y.samples() || x.rank() != y.rank())
    throw ShapeError("loop_metric: sections have different sample counts");
  if (s < 0) throw ConfigError("loop_metric: s must be a nonnegative integer");
  const int n = x.samples();
  Complex acc{};
  for (int r = 0; r < x.rank(); ++r) {
    const auto xf = x.fourier(r);
    const auto yf = y.fourier(r);
    for (int i = 0; i < n; ++i) {
      const double j = i <= n / 2 ? i : i - n;
      acc += std::pow(1.0 + j * j, s) * std::conj(xf[i]) * yf[i];
    }
  }
  return 2.0 * std::numbers::pi * acc;
}

// ---------------------------------------------------------------------------
// End-to-end leading-order Chern pairing on the constant-loop cycle

struct LeadingChernRecord {
  int m = 0;
  int n_theta = 0;
  int n_phi = 0;
  Complex raw_leading_order;   ///< <int tr sigma_0(Omega), [a~]>
  Complex raw_wodzicki;        ///< <res(Omega), [a~]>
  Complex finite_rank;         ///< <tr Omega_F, [a]> on the base
  Complex normalized;          ///< (i/2pi) raw / vol(S*S^1)
  Complex normalized_lattice;  ///< raw / (vol(S*S^1) 2 pi i)
  double factorization_error = 0.0;  ///< |raw - vol * finite| / |vol * finite|
  bool leading_matches = false;
  bool wodzicki_vanishes = false;
};

inline LeadingChernRecord loop_space_leading_chern(int m, int n_theta,
                                                   int n_phi,
                                                   double tolerance = 1e-5) {
  auto sphere = std::make_shared<const Cycle>(sphere_cycle(n_theta, n_phi));
  const SymbolFormField base = monopole_field(m, sphere, 1, 0);
  const SymbolFormField loops = pullback_gauge_field(base);
  LeadingChernRecord rec;
  rec.m = m;
  rec.n_theta = n_theta;
  rec.n_phi = n_phi;
  rec.raw_leading_order = chern_pairing(loops, 1, TraceKind::LeadingOrder);
  rec.raw_wodzicki = chern_pairing(loops, 1, TraceKind::Wodzicki);
  rec.finite_rank = finite_rank_pairing(base, 1);
  rec.normalized = chern_weil_normalization(1) * rec.raw_leading_order;
  rec.normalized_lattice = integral_lattice_normalization(1) * rec.raw_leading_order;
  const Complex expected_raw = kCosphereVolume * rec.finite_rank;
  rec.factorization_error =
      expected_raw == Complex{}
          ? std::abs(rec.raw_leading_order)
          : std::abs(rec.raw_leading_order - expected_raw) / std::abs(expected_raw);
  rec.leading_matches = std::abs(rec.normalized - Complex(m, 0.0)) <= tolerance;
  rec.wodzicki_vanishes = rec.raw_wodzicki == Complex{};
  return rec;
}

}  // namespace psdo
