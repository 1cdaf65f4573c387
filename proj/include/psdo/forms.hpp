#pragma once

// Symbol-valued differential forms on discretized closed cycles and their
// Chern-Weil pairings.
//
// A cycle is a single coordinate chart u = (u_0, ..., u_{d-1}) sampled on a
// tensor grid. Two parametrizations are provided:
//
//   sphere  (theta, phi), theta_i = (i + 1/2) pi / n_theta, phi_j = 2 pi j / n_phi
//   torus   u_i = 2 pi i / n in every coordinate
//
// A 2-form is stored by its coordinate components Omega_{mu nu}, mu < nu,
// relative to du^mu ^ du^nu. Integration uses
//
//   int Omega = sum_p w(p) Omega_{01}(p) / rho(p),
//
// where rho is the area density of the parametrization (sin theta on the
// sphere) and w(p) the measure of the grid cell around p. On the sphere w is
// the exact area of the latitude-longitude cell, so the weights sum to 4 pi.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "psdo/errors.hpp"
#include "psdo/symbol.hpp"
#include "psdo/symbol_io.hpp"
#include "psdo/traces.hpp"

namespace psdo {

enum class CycleKind { Sphere, Torus };

class Cycle {
 public:
  static Cycle sphere(int n_theta, int n_phi) {
    if (n_theta < 8 || n_phi < 8)
      throw ConfigError("sphere_cycle: grid must be at least 8 x 8, got " +
                        std::to_string(n_theta) + " x " +
                        std::to_string(n_phi));
    Cycle c;
    c.kind_ = CycleKind::Sphere;
    c.shape_ = {n_theta, n_phi};
    c.steps_ = {std::numbers::pi / n_theta, 2.0 * std::numbers::pi / n_phi};
    c.label_ = "sphere";
    return c;
  }

  static Cycle torus(int dimension, int n) {
    if (dimension < 1) throw ConfigError("torus_cycle: dimension must be >= 1");
    if (n < 4) throw ConfigError("torus_cycle: need at least 4 points per axis");
    Cycle c;
    c.kind_ = CycleKind::Torus;
    c.shape_.assign(static_cast<std::size_t>(dimension), n);
    c.steps_.assign(static_cast<std::size_t>(dimension),
                    2.0 * std::numbers::pi / n);
    c.label_ = "torus";
    return c;
  }

  CycleKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const noexcept { return shape_; }
  double step(int axis) const { return steps_.at(axis); }
  const std::string& label() const noexcept { return label_; }

  /// Same grid, relabelled (e.g. the image of the constant-loop inclusion).
  Cycle relabelled(std::string label) const {
    Cycle c = *this;
    c.label_ = std::move(label);
    return c;
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (int s : shape_) n *= static_cast<std::size_t>(s);
    return n;
  }

  /// Row-major flat index; the last axis varies fastest.
  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t p = 0;
    for (std::size_t a = 0; a < shape_.size(); ++a)
      p = p * static_cast<std::size_t>(shape_[a]) + static_cast<std::size_t>(idx[a]);
    return p;
  }

  std::vector<int> multi_index(std::size_t p) const {
    std::vector<int> idx(shape_.size());
    for (std::size_t a = shape_.size(); a-- > 0;) {
      idx[a] = static_cast<int>(p % static_cast<std::size_t>(shape_[a]));
      p /= static_cast<std::size_t>(shape_[a]);
    }
    return idx;
  }

  double coordinate(int axis, int i) const {
    if (kind_ == CycleKind::Sphere && axis == 0) return (i + 0.5) * steps_[0];
    return i * steps_.at(axis);
  }

  std::vector<double> coordinates(std::size_t p) const {
    const auto idx = multi_index(p);
    std::vector<double> u(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      u[a] = coordinate(static_cast<int>(a), idx[a]);
    return u;
  }

  /// Area (volume) density of the parametrization at p.
  double density(std::size_t p) const {
    if (kind_ == CycleKind::Torus) return 1.0;
    return std::sin(coordinate(0, multi_index(p)[0]));
  }

  /// Measure of the grid cell around p; sums to volume().
  double weight(std::size_t p) const {
    if (kind_ == CycleKind::Torus) {
      double w = 1.0;
      for (double h : steps_) w *= h;
      return w;
    }
    const double theta = coordinate(0, multi_index(p)[0]);
    // cos(theta - h/2) - cos(theta + h/2) = 2 sin(theta) sin(h/2)
    return 2.0 * std::sin(theta) * std::sin(0.5 * steps_[0]) * steps_[1];
  }

  double volume() const {
    if (kind_ == CycleKind::Sphere) return 4.0 * std::numbers::pi;
    return std::pow(2.0 * std::numbers::pi, dimension());
  }

 private:
  Cycle() = default;

  CycleKind kind_ = CycleKind::Torus;
  std::vector<int> shape_;
  std::vector<double> steps_;
  std::string label_;
};

inline Cycle sphere_cycle(int n_theta, int n_phi) {
  return Cycle::sphere(n_theta, n_phi);
}

inline Cycle torus_cycle(int dimension, int n) {
  return Cycle::torus(dimension, n);
}

/// Number of stored components of a degree-q form in d dimensions.
inline int form_slot_count(int dimension, int form_degree) {
  if (form_degree == 1) return dimension;
  if (form_degree == 2) return dimension * (dimension - 1) / 2;
  throw ConfigError("only 1-forms and 2-forms are stored");
}

/// Slot of the pair (mu, nu), mu < nu, in lexicographic order.
inline int pair_slot(int dimension, int mu, int nu) {
  return mu * dimension - mu * (mu + 1) / 2 + (nu - mu - 1);
}

/// ClassicalSymbol-valued 1- or 2-form on a cycle.
///
/// Components are produced by a generator (point, slot) -> symbol, which may
/// read precomputed storage or evaluate a closed form / stencil on demand.
/// Generators must be pure.
class SymbolFormField {
 public:
  using Generator = std::function<ClassicalSymbol(std::size_t, int)>;

  SymbolFormField(std::shared_ptr<const Cycle> cycle, int form_degree,
                  int rank, int truncation, int cutoff, Generator gen)
      : cycle_(std::move(cycle)), form_degree_(form_degree), rank_(rank),
        truncation_(truncation), cutoff_(cutoff), gen_(std::move(gen)) {
    if (!cycle_) throw ConfigError("form field needs a cycle");
    form_slot_count(cycle_->dimension(), form_degree_);
  }

  /// Field backed by explicit storage, values[p * slots + slot].
  static SymbolFormField dense(std::shared_ptr<const Cycle> cycle,
                               int form_degree,
                               std::vector<ClassicalSymbol> values) {
    const int slots = form_slot_count(cycle->dimension(), form_degree);
    if (values.size() != cycle->size() * static_cast<std::size_t>(slots))
      throw ShapeError("dense field: wrong number of components");
    if (values.empty()) throw ShapeError("dense field: empty");
    const auto& first = values.front();
    for (const auto& v : values) {
      first.check_compatible(v);
      if (v.truncation() != first.truncation())
        throw ShapeError("dense field: truncation mismatch");
    }
    const int rank = first.rank();
    const int truncation = first.truncation();
    const int cutoff = first.cutoff();
    auto store =
        std::make_shared<const std::vector<ClassicalSymbol>>(std::move(values));
    return {std::move(cycle), form_degree, rank, truncation, cutoff,
            [store, slots](std::size_t p, int slot) {
              return (*store)[p * static_cast<std::size_t>(slots) +
                              static_cast<std::size_t>(slot)];
            }};
  }

  /// Identically zero field.
  static SymbolFormField zero(std::shared_ptr<const Cycle> cycle,
                              int form_degree, int rank, int truncation,
                              int cutoff) {
    return {std::move(cycle), form_degree, rank, truncation, cutoff,
            [rank, truncation, cutoff](std::size_t, int) {
              return ClassicalSymbol(rank, truncation, cutoff);
            }};
  }

  const Cycle& cycle() const noexcept { return *cycle_; }
  std::shared_ptr<const Cycle> cycle_ptr() const noexcept { return cycle_; }
  int form_degree() const noexcept { return form_degree_; }
  int rank() const noexcept { return rank_; }
  int truncation() const noexcept { return truncation_; }
  int cutoff() const noexcept { return cutoff_; }
  int slot_count() const {
    return form_slot_count(cycle_->dimension(), form_degree_);
  }

  ClassicalSymbol at(std::size_t point, int slot) const {
    return gen_(point, slot);
  }

  /// Omega_{mu nu}(p) with Omega_{nu mu} = -Omega_{mu nu}.
  ClassicalSymbol component(std::size_t point, int mu, int nu) const {
    if (form_degree_ != 2) throw ConfigError("component(mu, nu) needs a 2-form");
    if (mu == nu) return {rank_, truncation_, cutoff_};
    if (mu < nu) return at(point, pair_slot(cycle_->dimension(), mu, nu));
    ClassicalSymbol s = at(point, pair_slot(cycle_->dimension(), nu, mu));
    s *= -1.0;
    return s;
  }

  /// Evaluates every component once into explicit storage.
  SymbolFormField materialize() const {
    const int slots = slot_count();
    std::vector<ClassicalSymbol> values;
    values.reserve(cycle_->size() * static_cast<std::size_t>(slots));
    for (std::size_t p = 0; p < cycle_->size(); ++p)
      for (int s = 0; s < slots; ++s) values.push_back(at(p, s));
    return dense(cycle_, form_degree_, std::move(values));
  }

 private:
  std::shared_ptr<const Cycle> cycle_;
  int form_degree_;
  int rank_;
  int truncation_;
  int cutoff_;
  Generator gen_;
};

inline SymbolFormField operator+(const SymbolFormField& a,
                                 const SymbolFormField& b) {
  if (a.cycle_ptr() != b.cycle_ptr() && a.cycle().shape() != b.cycle().shape())
    throw ShapeError("form fields live on different cycles");
  if (a.form_degree() != b.form_degree() || a.rank() != b.rank() ||
      a.cutoff() != b.cutoff())
    throw ShapeError("form fields have different shapes");
  const int truncation = std::max(a.truncation(), b.truncation());
  return {a.cycle_ptr(), a.form_degree(), a.rank(), truncation, a.cutoff(),
          [a, b](std::size_t p, int slot) {
            ClassicalSymbol s = a.at(p, slot);
            s += b.at(p, slot);
            return s;
          }};
}

namespace detail {

/// d theta_comp / du^dir at p by second-order central differences.
///
/// Torus axes and the sphere's phi axis are periodic. On the sphere's
/// theta axis the first and last rows need a ghost value across the pole:
///  - phi component: the coordinate component of a smooth 1-form along
///    d phi vanishes at the pole, so the ghost is the odd reflection about
///    that pole value. The stencil drops to first order on the two polar
///    rows but the sum of the theta-differences telescopes exactly.
///  - theta component: reflected through the pole to phi + pi (even n_phi),
///    with sign flip from the reversed coordinate direction; for odd n_phi
///    a first-order one-sided stencil is used instead.
inline ClassicalSymbol partial(const SymbolFormField& theta, std::size_t p,
                               int dir, int comp) {
  const Cycle& cyc = theta.cycle();
  auto idx = cyc.multi_index(p);
  const int n = cyc.shape()[dir];
  const double h = cyc.step(dir);
  auto value_at = [&](std::vector<int> at_idx) {
    return theta.at(cyc.flat(at_idx), comp);
  };
  auto shifted = [&](int offset) {
    auto j = idx;
    j[dir] = ((j[dir] + offset) % n + n) % n;
    return j;
  };

  const bool polar = cyc.kind() == CycleKind::Sphere && dir == 0;
  if (!polar || (idx[0] > 0 && idx[0] < n - 1)) {
    ClassicalSymbol d = value_at(shifted(+1));
    d -= value_at(shifted(-1));
    d *= 1.0 / (2.0 * h);
    return d;
  }

  const bool north = idx[0] == 0;
  const auto inner = shifted(north ? +1 : -1);
  const ClassicalSymbol here = value_at(idx);
  ClassicalSymbol ghost(theta.rank(), theta.truncation(), theta.cutoff());
  const int n_phi = cyc.shape()[1];
  if (comp == 1) {
    ghost = here;
    ghost *= -1.0;
  } else if (n_phi % 2 == 0) {
    auto across = idx;
    across[1] = (idx[1] + n_phi / 2) % n_phi;
    ghost = value_at(across);
    ghost *= -1.0;
  } else {
    ClassicalSymbol d = value_at(inner);
    d -= here;
    d *= (north ? 1.0 : -1.0) / h;
    return d;
  }
  // Central difference with the ghost on the pole side.
  ClassicalSymbol d = value_at(inner);
  d -= ghost;
  d *= (north ? 1.0 : -1.0) / (2.0 * h);
  return d;
}

}  // namespace detail

/// Omega = d theta + theta ^ theta for a globally defined connection 1-form:
///   Omega_{mu nu} = d_mu theta_nu - d_nu theta_mu + theta_mu # theta_nu
///                   - theta_nu # theta_mu.
/// Components are evaluated on demand from the stencil.
inline SymbolFormField curvature_from_connection(const SymbolFormField& theta,
                                                 int truncation) {
  if (theta.form_degree() != 1)
    throw ConfigError("curvature_from_connection needs a 1-form");
  detail::check_truncation(truncation, theta.truncation());
  const int dim = theta.cycle().dimension();
  std::vector<std::pair<int, int>> pairs;
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = mu + 1; nu < dim; ++nu) pairs.emplace_back(mu, nu);
  return {theta.cycle_ptr(), 2, theta.rank(), truncation, theta.cutoff(),
          [theta, truncation, pairs](std::size_t p, int slot) {
            const auto [mu, nu] = pairs[static_cast<std::size_t>(slot)];
            ClassicalSymbol omega = detail::partial(theta, p, mu, nu);
            omega -= detail::partial(theta, p, nu, mu);
            omega = truncated(omega, truncation);
            omega += commutator(theta.at(p, mu), theta.at(p, nu), truncation);
            return omega;
          }};
}

/// One term of the top coefficient of Omega^k: an ordered sequence of slots
/// (mu_1 < nu_1), ..., (mu_k < nu_k) partitioning {0, ..., 2k-1}, with the
/// sign of the permutation (mu_1 nu_1 ... mu_k nu_k).
struct WedgeTerm {
  int sign;
  std::vector<int> slots;
};

/// Expansion of (Omega^k)_{0 1 ... 2k-1} for Omega = sum_{mu<nu} Omega_{mu nu}
/// du^mu ^ du^nu. Equivalently (1/2^k) sum over all permutations pi of
/// sgn(pi) Omega_{pi0 pi1} ... Omega_{pi(2k-2) pi(2k-1)}; there are
/// (2k)! / 2^k terms, 1 for k = 1 and 6 for k = 2.
inline std::vector<WedgeTerm> wedge_power_terms(int k) {
  if (k < 1) throw ConfigError("wedge power needs k >= 1");
  const int dim = 2 * k;
  std::vector<WedgeTerm> terms;
  std::vector<int> order;
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  std::function<void()> recurse = [&] {
    if (static_cast<int>(order.size()) == dim) {
      int inversions = 0;
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
          if (order[i] > order[j]) ++inversions;
      WedgeTerm t{inversions % 2 == 0 ? 1 : -1, {}};
      for (int i = 0; i < dim; i += 2)
        t.slots.push_back(pair_slot(dim, order[i], order[i + 1]));
      terms.push_back(std::move(t));
      return;
    }
    for (int mu = 0; mu < dim; ++mu) {
      if (used[mu]) continue;
      for (int nu = mu + 1; nu < dim; ++nu) {
        if (used[nu]) continue;
        used[mu] = used[nu] = true;
        order.push_back(mu);
        order.push_back(nu);
        recurse();
        order.resize(order.size() - 2);
        used[mu] = used[nu] = false;
      }
    }
  };
  recurse();
  return terms;
}

struct PairingOptions {
  bool compensated = false;  ///< Neumaier summation over grid points
};

namespace detail {

class Accumulator {
 public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}

  void add(Complex v) {
    if (!compensated_) {
      sum_ += v;
      return;
    }
    add_part(re_, re_c_, v.real());
    add_part(im_, im_c_, v.imag());
  }

  Complex value() const {
    if (!compensated_) return sum_;
    return {re_ + re_c_, im_ + im_c_};
  }

 private:
  static void add_part(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }

  bool compensated_;
  Complex sum_{};
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

}  // namespace detail

/// Top coefficient of tr(Omega^k) at p for the chosen trace.
inline Complex wedge_power_trace(const SymbolFormField& field, std::size_t p,
                                 const std::vector<WedgeTerm>& terms,
                                 TraceKind kind) {
  const int slots = field.slot_count();
  std::vector<ClassicalSymbol> omega;
  omega.reserve(static_cast<std::size_t>(slots));
  for (int s = 0; s < slots; ++s) omega.push_back(field.at(p, s));
  Complex value{};
  for (const auto& t : terms) {
    ClassicalSymbol prod = omega[static_cast<std::size_t>(t.slots[0])];
    for (std::size_t i = 1; i < t.slots.size(); ++i)
      prod = compose(prod, omega[static_cast<std::size_t>(t.slots[i])],
                     field.truncation());
    value += static_cast<double>(t.sign) * trace(kind, prod);
  }
  return value;
}

/// <tr(Omega^k), cycle>: sum_p w(p) (Omega^k)_{0..2k-1}(p) / rho(p).
inline Complex chern_pairing(const SymbolFormField& field, int k,
                             TraceKind kind, const PairingOptions& opts = {}) {
  if (field.form_degree() != 2)
    throw ConfigError("chern_pairing needs a curvature 2-form");
  if (field.cycle().dimension() != 2 * k)
    throw ShapeError("chern_pairing: cycle dimension " +
                     std::to_string(field.cycle().dimension()) +
                     " does not equal 2k = " + std::to_string(2 * k));
  const auto terms = wedge_power_terms(k);
  const Cycle& cyc = field.cycle();
  detail::Accumulator acc(opts.compensated);
  for (std::size_t p = 0; p < cyc.size(); ++p) {
    const Complex v = wedge_power_trace(field, p, terms, kind);
    acc.add(v * (cyc.weight(p) / cyc.density(p)));
  }
  return acc.value();
}

// Field dump: a header followed by every component in symbol format.
//
//   psdo-field 1
//   cycle <sphere|torus> <label> <dimension> <n_0> ... <n_{d-1}>
//   form-degree <q>
//   rank <l> truncation <K> cutoff <F>
//   point <p> slot <s>
//   <psdo-symbol block>
//   ...
//   end-field
inline void write_field(std::ostream& out, const SymbolFormField& field) {
  const Cycle& cyc = field.cycle();
  out << "psdo-field 1\ncycle "
      << (cyc.kind() == CycleKind::Sphere ? "sphere" : "torus") << ' '
      << cyc.label() << ' ' << cyc.dimension();
  for (int n : cyc.shape()) out << ' ' << n;
  out << "\nform-degree " << field.form_degree() << "\nrank " << field.rank()
      << " truncation " << field.truncation() << " cutoff " << field.cutoff()
      << '\n';
  for (std::size_t p = 0; p < cyc.size(); ++p)
    for (int s = 0; s < field.slot_count(); ++s) {
      out << "point " << p << " slot " << s << '\n';
      write_symbol(out, field.at(p, s));
    }
  out << "end-field\n";
}

inline SymbolFormField read_field(std::istream& in) {
  io::expect(in, "psdo-field");
  if (io::parse_int(io::next_token(in)) != 1)
    throw FormatError("unsupported field format version");
  io::expect(in, "cycle");
  const std::string kind = io::next_token(in);
  const std::string label = io::next_token(in);
  const int dim = io::parse_int(io::next_token(in));
  std::vector<int> shape(static_cast<std::size_t>(std::max(dim, 0)));
  for (auto& n : shape) n = io::parse_int(io::next_token(in));
  std::shared_ptr<const Cycle> cycle;
  if (kind == "sphere" && dim == 2) {
    cycle = std::make_shared<const Cycle>(
        Cycle::sphere(shape[0], shape[1]).relabelled(label));
  } else if (kind == "torus" && dim >= 1) {
    for (int n : shape)
      if (n != shape[0]) throw FormatError("anisotropic torus grids are not supported");
    cycle = std::make_shared<const Cycle>(
        Cycle::torus(dim, shape[0]).relabelled(label));
  } else {
    throw FormatError("unknown cycle '" + kind + "'");
  }
  const int degree = io::expect_int(in, "form-degree");
  const int rank = io::expect_int(in, "rank");
  const int truncation = io::expect_int(in, "truncation");
  const int cutoff = io::expect_int(in, "cutoff");
  const int slots = form_slot_count(dim, degree);
  std::vector<ClassicalSymbol> values;
  values.reserve(cycle->size() * static_cast<std::size_t>(slots));
  for (std::size_t p = 0; p < cycle->size(); ++p)
    for (int s = 0; s < slots; ++s) {
      if (io::expect_int(in, "point") != static_cast<int>(p) ||
          io::expect_int(in, "slot") != s)
        throw FormatError("field components out of order");
      values.push_back(read_symbol(in));
      const auto& v = values.back();
      if (v.rank() != rank || v.truncation() != truncation ||
          v.cutoff() != cutoff)
        throw FormatError("field component shape differs from header");
    }
  io::expect(in, "end-field");
  return SymbolFormField::dense(std::move(cycle), degree, std::move(values));
}

}  // namespace psdo
