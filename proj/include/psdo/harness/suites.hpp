#pragma once

// The experiment suites. Each suite appends checks and tables to a report;
// run_suite validates the configuration, runs the named suite (or all of
// them) and persists the results.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "psdo/gallery.hpp"
#include "psdo/harness/config.hpp"
#include "psdo/harness/report.hpp"
#include "psdo/quantize.hpp"
#include "psdo/seminorm.hpp"
#include "psdo/traces.hpp"

namespace psdo::harness {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for suite number `index`, so a suite sees the same
/// random data whether it runs alone or inside `all`.
inline Rng suite_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed ^ splitmix64(index + 1)));
}

inline double least_squares_slope(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// e^{ix} |xi|^{-1} on both sheets.
inline ClassicalSymbol decay_example_symbol(int truncation, int cutoff) {
  ClassicalSymbol a(1, truncation, cutoff);
  for (Sheet s : kSheets)
    a.component(-1).sheet(s) = MatrixSeries::mode(1, cutoff, std::min(1, cutoff), 1.0);
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline void run_traces(const ExperimentConfig& cfg, ExperimentReport& r) {
  const std::string p = "traces/";
  {
    Rng rng = detail::suite_rng(cfg.seed, 0);
    const auto mult = random_symbol(rng, cfg.rank, 0, cfg.F);
    r.add(p + "multiplication-wodzicki", std::abs(wodzicki_residue(mult)), 0.0,
          0.0, Comparison::Exact, Provenance::Literature);
  }
  {
    ClassicalSymbol a(1, 1, 0);
    a.component(-1).sheet(Sheet::Plus) = MatrixSeries::mode(1, 0, 0, 3.0);
    a.component(-1).sheet(Sheet::Minus) = MatrixSeries::mode(1, 0, 0, 1.0);
    r.add(p + "constant-sheets-wodzicki", wodzicki_residue(a).real(), 4.0, 0.0,
          Comparison::Exact, Provenance::Trivial);
  }
  r.add(p + "identity-leading-order",
        leading_order_trace(ClassicalSymbol::identity(cfg.rank, 0, cfg.F)).real(),
        kCosphereVolume * cfg.rank, 1e-12, Comparison::AbsDiff,
        Provenance::Trivial);
  {
    ClassicalSymbol a(cfg.rank, 0, cfg.F);
    for (Sheet s : kSheets)
      a.component(0).sheet(s) = MatrixSeries::mode(cfg.rank, cfg.F, 1, 1.0);
    r.add(p + "zero-mean-leading-order", std::abs(leading_order_trace(a)), 0.0,
          0.0, Comparison::Exact, Provenance::Trivial);
  }

  Rng rng = detail::suite_rng(cfg.seed, 1);
  double max_rel_w = 0.0, max_rel_lo = 0.0, max_abs_w = 0.0, max_abs_lo = 0.0;
  double max_linearity = 0.0;
  double max_order_two = 0.0;
  for (int i = 0; i < cfg.ensemble_size; ++i) {
    const auto a = random_symbol(rng, cfg.rank, cfg.K, cfg.F);
    const auto b = random_symbol(rng, cfg.rank, cfg.K, cfg.F);
    const auto c = commutator(a, b, cfg.K);
    const double scale = max_seminorm(a, cfg.seminorm_order) *
                         max_seminorm(b, cfg.seminorm_order);
    const double w = std::abs(wodzicki_residue(c));
    const double lo = std::abs(leading_order_trace(c));
    max_abs_w = std::max(max_abs_w, w);
    max_abs_lo = std::max(max_abs_lo, lo);
    max_rel_w = std::max(max_rel_w, w / scale);
    max_rel_lo = std::max(max_rel_lo, lo / scale);

    const Complex alpha = rng.complex_normal(), beta = rng.complex_normal();
    auto combo = a;
    combo *= alpha;
    combo.add_scaled(beta, b);
    for (TraceKind kind : {TraceKind::Wodzicki, TraceKind::LeadingOrder}) {
      const Complex lhs = trace(kind, combo);
      const Complex rhs = alpha * trace(kind, a) + beta * trace(kind, b);
      max_linearity = std::max(max_linearity, std::abs(lhs - rhs));
    }
    auto low = c;
    for (int q = 0; q <= std::min(1, cfg.K); ++q)
      low.set_component(HomogeneousComponent(-q, cfg.rank, cfg.F));
    max_order_two = std::max(max_order_two, std::abs(wodzicki_residue(low)));
  }
  const std::string n = " over " + std::to_string(cfg.ensemble_size) + " pairs";
  r.add(p + "commutator-wodzicki-relative", max_rel_w, 0.0, cfg.tol_trace,
        Comparison::Below, Provenance::Literature,
        "max |res[a,b]| / (scale a * scale b)" + n);
  r.add(p + "commutator-leading-order-relative", max_rel_lo, 0.0, cfg.tol_trace,
        Comparison::Below, Provenance::Literature,
        "max |lo[a,b]| / (scale a * scale b)" + n);
  r.add(p + "commutator-wodzicki-absolute", max_abs_w, 0.0, 1e-12,
        Comparison::Below, Provenance::Derived, "max |res[a,b]|" + n);
  r.add(p + "commutator-leading-order-absolute", max_abs_lo, 0.0, 1e-12,
        Comparison::Below, Provenance::Derived, "max |lo[a,b]|" + n);
  r.add(p + "linearity", max_linearity, 0.0, 1e-12, Comparison::Below,
        Provenance::Trivial);
  r.add(p + "order-minus-two-wodzicki", max_order_two, 0.0, 0.0,
        Comparison::Exact, Provenance::Trivial);
}

// ---------------------------------------------------------------------------

inline void run_quantize_decay(const ExperimentConfig& cfg, ExperimentReport& r) {
  const std::string p = "quantize-decay/";
  Table t{"defect-decay", {"J"}, {}};
  for (int k : cfg.decay_truncations) t.header.push_back("defect_K" + std::to_string(k));
  for (int j : cfg.decay_modes) t.rows.push_back({static_cast<double>(j)});

  const int cutoff = std::min(cfg.F, *std::min_element(cfg.decay_modes.begin(),
                                                       cfg.decay_modes.end()));
  for (int k : cfg.decay_truncations) {
    const auto a = detail::decay_example_symbol(k, cutoff);
    std::vector<double> x, y;
    bool ok = true;
    for (std::size_t i = 0; i < cfg.decay_modes.size(); ++i) {
      const int j = cfg.decay_modes[i];
      double d = 0.0;
      try {
        d = mid_band_defect_norm(composition_defect(a, a, k, j));
      } catch (const NumericalFailure& e) {
        d = e.last_estimate();
        ok = false;
        r.add_failure(p + "defect-K" + std::to_string(k) + "-J" + std::to_string(j),
                      Provenance::Derived, e.what());
      }
      t.rows[i].push_back(d);
      x.push_back(std::log(static_cast<double>(j)));
      y.push_back(std::log(d));
    }
    const double slope = detail::least_squares_slope(x, y);
    auto& c = r.add(p + "slope-K" + std::to_string(k), slope, -(k + 1.0),
                    cfg.tol_slope, Comparison::AbsDiff, Provenance::Derived,
                    "log-log slope of the mid-band defect norm");
    c.passed = c.passed && ok;
  }
  r.tables.push_back(std::move(t));

  {
    Rng rng = detail::suite_rng(cfg.seed, 2);
    const auto a = random_symbol(rng, cfg.rank, cfg.K, cfg.F);
    const ClassicalSymbol zero(cfg.rank, cfg.K, cfg.F);
    const auto d = composition_defect(a, zero, cfg.K, cfg.J);
    r.add(p + "zero-symbol-defect", d.data.cwiseAbs().maxCoeff(), 0.0, 0.0,
          Comparison::Exact, Provenance::Trivial);
  }
  {
    // Diagonal constants: defect confined to the excised and edge columns.
    Eigen::MatrixXcd da = Eigen::MatrixXcd::Zero(cfg.rank, cfg.rank);
    Eigen::MatrixXcd db = da;
    for (int i = 0; i < cfg.rank; ++i) {
      da(i, i) = 1.0 + i;
      db(i, i) = Complex(0.5, -static_cast<double>(i));
    }
    const auto a = ClassicalSymbol::multiplication(da, 0, cfg.F);
    const auto b = ClassicalSymbol::multiplication(db, 0, cfg.F);
    const auto d = composition_defect(a, b, 0, cfg.J);
    double interior = 0.0;
    for (int j = -cfg.J; j <= cfg.J; ++j) {
      if (j == 0 || std::abs(j) > cfg.J - cfg.F) continue;
      interior = std::max(
          interior,
          d.data.middleCols(mode_index(j, 0, cfg.rank, cfg.J), cfg.rank)
              .cwiseAbs()
              .maxCoeff());
    }
    r.add(p + "diagonal-constants-interior-defect", interior, 0.0, 0.0,
          Comparison::Exact, Provenance::Trivial);
  }
}

// ---------------------------------------------------------------------------

inline void run_norm_continuity(const ExperimentConfig& cfg, ExperimentReport& r) {
  const std::string p = "norm-continuity/";
  Rng rng = detail::suite_rng(cfg.seed, 3);
  Table t{"norm-ratios", {"index", "operator_norm", "max_seminorm", "ratio"}, {}};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int failures = 0;
  ClassicalSymbol first(cfg.rank, cfg.K, cfg.F);
  double first_norm = 0.0;
  for (int i = 0; i < cfg.ensemble_size; ++i) {
    const auto a = random_symbol(rng, cfg.rank, cfg.K, cfg.F);
    double norm = 0.0;
    try {
      norm = operator_norm(quantize(a, cfg.J), cfg.sobolev_order, cfg.sobolev_order);
    } catch (const NumericalFailure& e) {
      ++failures;
      r.add_failure(p + "operator-norm-" + std::to_string(i), Provenance::Derived,
                    std::string(e.what()) + "; last estimate " +
                        io::format_double(e.last_estimate()));
      continue;
    }
    const double semi = max_seminorm(a, cfg.seminorm_order);
    const double ratio = norm / semi;
    if (i == 0) {
      first = a;
      first_norm = norm;
    }
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    t.rows.push_back({static_cast<double>(i), norm, semi, ratio});
  }
  r.tables.push_back(std::move(t));
  r.add(p + "ratio-min", lo, 0.0, 0.0, Comparison::AtLeast, Provenance::Derived,
        "c: smallest operator_norm / max seminorm");
  r.add(p + "ratio-max", hi, 0.0, 0.0, Comparison::AtLeast, Provenance::Derived,
        "C: largest operator_norm / max seminorm");
  r.add(p + "ratio-spread", failures == 0 && lo > 0.0 ? hi / lo
                                                       : std::numeric_limits<double>::infinity(),
        0.0, cfg.max_norm_spread, Comparison::Below, Provenance::Derived, "C / c");

  if (first_norm > 0.0) {
    double worst = 0.0;
    for (int i = 2; i <= 5; ++i) {
      auto scaled = first;
      scaled *= 1.0 / i;
      try {
        const double n =
            operator_norm(quantize(scaled, cfg.J), cfg.sobolev_order, cfg.sobolev_order);
        worst = std::max(worst, std::abs(n * i - first_norm) / first_norm);
      } catch (const NumericalFailure& e) {
        worst = std::numeric_limits<double>::infinity();
      }
    }
    r.add(p + "scaling-a-over-i", worst, 0.0, 1e-12, Comparison::Below,
          Provenance::Trivial, "max_i |i norm(a/i) - norm(a)| / norm(a), i = 2..5");
  }
}

// ---------------------------------------------------------------------------

inline void run_chern(const ExperimentConfig& cfg, ExperimentReport& r) {
  const std::string p = "chern/";
  Table t{"chern-sweep",
          {"m", "n_theta", "n_phi", "raw_leading_re", "raw_leading_im",
           "finite_rank_re", "finite_rank_im", "normalized_re", "normalized_im",
           "lattice_re", "lattice_im", "wodzicki_re", "wodzicki_im"},
          {}};
  for (int m : cfg.m_values) {
    const auto rec = loop_space_leading_chern(m, cfg.n_theta, cfg.n_phi, cfg.tol_chern);
    const std::string q = p + "m=" + std::to_string(m) + "/";
    r.add(q + "normalized-leading-order", rec.normalized.real(), m, cfg.tol_chern,
          Comparison::AbsDiff, Provenance::Derived,
          "(i/2pi) raw / vol(S*S^1); the lattice reading gives " +
              io::format_double(rec.normalized_lattice.real()));
    r.add(q + "normalized-imaginary-part", std::abs(rec.normalized.imag()), 0.0,
          cfg.tol_chern, Comparison::Below, Provenance::Derived);
    r.add(q + "wodzicki", std::abs(rec.raw_wodzicki), 0.0, 0.0, Comparison::Exact,
          Provenance::Literature);
    r.add(q + "factorization", rec.factorization_error, 0.0, cfg.tol_factorization,
          Comparison::Below, Provenance::Literature,
          "|raw - vol(S*S^1) finite| / |vol(S*S^1) finite|");
    t.rows.push_back({static_cast<double>(m), static_cast<double>(cfg.n_theta),
                      static_cast<double>(cfg.n_phi), rec.raw_leading_order.real(),
                      rec.raw_leading_order.imag(), rec.finite_rank.real(),
                      rec.finite_rank.imag(), rec.normalized.real(),
                      rec.normalized.imag(), rec.normalized_lattice.real(),
                      rec.normalized_lattice.imag(), rec.raw_wodzicki.real(),
                      rec.raw_wodzicki.imag()});
  }
  r.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------

/// Pairing errors below this are treated as converged roundoff when judging
/// the refinement order.
inline constexpr double kRoundoffFloor = 1e-12;

inline void run_wodzicki_vanish(const ExperimentConfig& cfg, ExperimentReport& r) {
  const std::string p = "wodzicki-vanish/";
  {
    auto sphere = std::make_shared<const Cycle>(sphere_cycle(cfg.n_theta, cfg.n_phi));
    for (int m : cfg.m_values) {
      const Complex w =
          chern_pairing(monopole_field(m, sphere, cfg.K, 0), 1, TraceKind::Wodzicki);
      const bool bitwise = w.real() == 0.0 && w.imag() == 0.0 &&
                           !std::signbit(w.real()) && !std::signbit(w.imag());
      auto& c = r.add(p + "monopole-m=" + std::to_string(m), std::abs(w), 0.0, 0.0,
                      Comparison::Exact, Provenance::Literature);
      c.passed = c.passed && bitwise;
    }
  }

  auto coarse = std::make_shared<const Cycle>(
      sphere_cycle(cfg.connection_n_theta, cfg.connection_n_phi));
  auto fine = std::make_shared<const Cycle>(
      sphere_cycle(2 * cfg.connection_n_theta, 2 * cfg.connection_n_phi));
  Rng rng = detail::suite_rng(cfg.seed, 5);
  Table t{"connection-wodzicki",
          {"index", "n_theta", "abs_wodzicki", "abs_wodzicki_refined", "abs_leading"},
          {}};
  double worst = 0.0, worst_lo = 0.0;
  for (int i = 0; i < cfg.connection_count; ++i) {
    const std::uint64_t seed = rng.split();
    auto pairing = [&](const std::shared_ptr<const Cycle>& cyc, TraceKind kind) {
      const auto theta = random_negative_order_connection(
          seed, cyc, cfg.connection_truncation, cfg.connection_cutoff, cfg.rank);
      return std::abs(chern_pairing(
          curvature_from_connection(theta, cfg.connection_truncation), 1, kind));
    };
    const double e1 = pairing(coarse, TraceKind::Wodzicki);
    const double e2 = pairing(fine, TraceKind::Wodzicki);
    const double lo = i == 0 ? pairing(coarse, TraceKind::LeadingOrder) : 0.0;
    worst = std::max(worst, e1);
    worst_lo = std::max(worst_lo, lo);
    t.rows.push_back({static_cast<double>(i),
                      static_cast<double>(cfg.connection_n_theta), e1, e2, lo});

    const std::string q = p + "connection-" + std::to_string(i) + "/";
    r.add(q + "wodzicki", e1, 0.0, cfg.tol_connection_wodzicki, Comparison::Below,
          Provenance::Derived);
    // Observed order log2(e1 / e2); when both errors sit at roundoff the
    // ratio carries no information and the check falls back to the floor.
    const double order = e2 > 0.0 && e1 > 0.0 ? std::log2(e1 / e2)
                                               : std::numeric_limits<double>::infinity();
    const bool at_floor = e1 <= kRoundoffFloor && e2 <= kRoundoffFloor;
    Check c{q + "refinement-order", order, 2.0, kRoundoffFloor,
            Comparison::OrderOrFloor, Provenance::Derived, order >= 2.0 || at_floor,
            "errors " + io::format_double(e1) + " -> " + io::format_double(e2) +
                (at_floor ? " (both at roundoff floor)" : "")};
    r.checks.push_back(std::move(c));
  }
  r.tables.push_back(std::move(t));
  if (cfg.connection_count > 0) {
    r.add(p + "connections-max-wodzicki", worst, 0.0, cfg.tol_connection_wodzicki,
          Comparison::Below, Provenance::Derived);
    r.add(p + "connection-leading-order", worst_lo, 0.0, 1e-12, Comparison::Below,
          Provenance::Trivial, "connection 0, zero degree-0 part");
  }
}

// ---------------------------------------------------------------------------

inline void run_loop_metric(const ExperimentConfig& cfg, ExperimentReport& r) {
  const std::string p = "loop-metric/";
  const int samples = 128;
  const auto e1 = LoopSection::sample(1, samples, [](double t, int) {
    return std::exp(Complex(0.0, t));
  });
  const auto one = LoopSection::sample(1, samples, [](double, int) { return Complex(1.0); });
  for (int s : cfg.s_values) {
    const Complex g = loop_metric(e1, e1, s);
    r.add(p + "first-mode-s=" + std::to_string(s), g.real(),
          2.0 * std::numbers::pi * std::pow(2.0, s), cfg.tol_loop_metric,
          Comparison::AbsDiff, Provenance::Trivial);
    r.add(p + "constant-s=" + std::to_string(s), loop_metric(one, one, s).real(),
          2.0 * std::numbers::pi, cfg.tol_loop_metric, Comparison::AbsDiff,
          Provenance::Trivial);
  }

  Rng rng = detail::suite_rng(cfg.seed, 6);
  std::vector<Complex> vx(static_cast<std::size_t>(samples) * cfg.rank),
      vy(vx.size());
  for (auto& z : vx) z = rng.complex_normal();
  for (auto& z : vy) z = rng.complex_normal();
  const LoopSection x(cfg.rank, vx), y(cfg.rank, vy);
  Complex trap{};
  for (int n = 0; n < samples; ++n)
    for (int c = 0; c < cfg.rank; ++c) trap += std::conj(x.value(n, c)) * y.value(n, c);
  trap *= 2.0 * std::numbers::pi / samples;
  r.add(p + "l2-vs-trapezoid", std::abs(loop_metric(x, y, 0) - trap), 0.0,
        cfg.tol_loop_metric, Comparison::Below, Provenance::Derived);

  double prev = 0.0;
  bool monotone = true;
  for (int s = 0; s <= 4; ++s) {
    const double g = loop_metric(x, x, s).real();
    monotone = monotone && g > prev;
    prev = g;
  }
  r.add(p + "positive-and-monotone", monotone ? 1.0 : 0.0, 1.0, 0.0,
        Comparison::Exact, Provenance::Trivial, "<X,X>_s increasing in s = 0..4");
}

// ---------------------------------------------------------------------------

using SuiteFn = void (*)(const ExperimentConfig&, ExperimentReport&);

inline const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table{
      {"traces", run_traces},
      {"quantize-decay", run_quantize_decay},
      {"norm-continuity", run_norm_continuity},
      {"chern", run_chern},
      {"wodzicki-vanish", run_wodzicki_vanish},
      {"loop-metric", run_loop_metric}};
  return table;
}

/// Runs the configured suite. Throws ConfigError before doing any work if the
/// configuration is invalid. Writes report.json and the CSV tables when
/// out_dir is set.
inline ExperimentReport run_suite(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport r;
  r.suite = cfg.suite;
  r.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [name, fn] : suite_table()) {
    if (cfg.suite != "all" && cfg.suite != name) continue;
    const auto suite_start = std::chrono::steady_clock::now();
    try {
      fn(cfg, r);
    } catch (const NumericalFailure& e) {
      r.add_failure(name + "/numerical-failure", Provenance::Derived,
                    std::string(e.what()) + "; last estimate " +
                        io::format_double(e.last_estimate()));
    }
    r.suite_seconds.emplace_back(
        name, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            suite_start)
                  .count());
  }
  r.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!cfg.out_dir.empty()) {
    const std::filesystem::path dir(cfg.out_dir);
    r.artifacts = emit_plot_data(r, dir);
    r.artifacts.push_back("report.json");
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir / "report.json").string() + "'");
    out << report_json(r).dump(2) << '\n';
  }
  return r;
}

}  // namespace psdo::harness
