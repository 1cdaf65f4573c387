#pragma once

// Experiment reports: per-check records, data tables, JSON and CSV output.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psdo/harness/config.hpp"
#include "psdo/symbol_io.hpp"

namespace psdo::harness {

/// Where the expected value of a check comes from.
enum class Provenance {
  Literature,  ///< a statement of the underlying theory
  Trivial,     ///< direct evaluation or a contract
  Derived,     ///< an independent oracle computed here
};

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Literature: return "literature";
    case Provenance::Trivial: return "trivial";
    case Provenance::Derived: return "derived";
  }
  return "unknown";
}

/// How measured and expected are compared.
enum class Comparison {
  AbsDiff,    ///< |measured - expected| <= tolerance
  RelDiff,    ///< |measured - expected| <= tolerance |expected|
  Below,      ///< measured < tolerance (expected is 0)
  AtLeast,    ///< measured >= expected - tolerance
  Exact,      ///< measured == expected bitwise
  OrderOrFloor,  ///< measured order >= expected, or errors below tolerance
};

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::AbsDiff: return "abs-diff";
    case Comparison::RelDiff: return "rel-diff";
    case Comparison::Below: return "below";
    case Comparison::AtLeast: return "at-least";
    case Comparison::Exact: return "exact";
    case Comparison::OrderOrFloor: return "order-or-floor";
  }
  return "unknown";
}

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::AbsDiff;
  Provenance provenance = Provenance::Trivial;
  bool passed = false;
  std::string note;
};

inline bool evaluate(Comparison c, double measured, double expected,
                     double tolerance) {
  switch (c) {
    case Comparison::AbsDiff: return std::abs(measured - expected) <= tolerance;
    case Comparison::RelDiff:
      return std::abs(measured - expected) <= tolerance * std::abs(expected);
    case Comparison::Below: return measured < tolerance;
    case Comparison::AtLeast: return measured >= expected - tolerance;
    case Comparison::Exact: return measured == expected;
    case Comparison::OrderOrFloor: return measured >= expected;
  }
  return false;
}

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string suite;
  ExperimentConfig config;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<std::string> artifacts;  ///< file names relative to out_dir
  double duration_seconds = 0.0;
  std::vector<std::pair<std::string, double>> suite_seconds;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  Check& add(std::string name, double measured, double expected,
             double tolerance, Comparison cmp, Provenance prov,
             std::string note = {}) {
    Check c{std::move(name), measured, expected, tolerance, cmp, prov, false,
            std::move(note)};
    c.passed = evaluate(cmp, measured, expected, tolerance);
    checks.push_back(std::move(c));
    return checks.back();
  }

  /// A check that could not be computed (e.g. a numerical failure).
  Check& add_failure(std::string name, Provenance prov, std::string note) {
    checks.push_back({std::move(name), 0.0, 0.0, 0.0, Comparison::Exact, prov,
                      false, std::move(note)});
    return checks.back();
  }

  double seconds(const std::string& suite_name) const {
    for (const auto& [name, secs] : suite_seconds)
      if (name == suite_name) return secs;
    return 0.0;
  }

  const Check* check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  const Table* table(const std::string& name) const {
    for (const auto& t : tables)
      if (t.name == name) return &t;
    return nullptr;
  }
};

namespace detail {

// JSON has no inf/nan; such values are written as strings.
inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return io::format_double(v);
}

}  // namespace detail

/// Everything except timing: identical for identical config and seed.
inline nlohmann::json report_body(const ExperimentReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"measured", detail::number(c.measured)},
                      {"expected", detail::number(c.expected)},
                      {"tolerance", detail::number(c.tolerance)},
                      {"comparison", to_string(c.comparison)},
                      {"provenance", to_string(c.provenance)},
                      {"passed", c.passed},
                      {"note", c.note}});
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : r.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (double v : row) jr.push_back(detail::number(v));
      rows.push_back(std::move(jr));
    }
    tables.push_back({{"name", t.name}, {"header", t.header}, {"rows", rows}});
  }
  return {{"suite", r.suite},
          {"seed", r.config.seed},
          {"parameters", to_json(r.config)},
          {"checks", checks},
          {"tables", tables},
          {"artifacts", r.artifacts},
          {"passed", r.passed()}};
}

inline nlohmann::json report_json(const ExperimentReport& r) {
  auto j = report_body(r);
  j["duration_seconds"] = r.duration_seconds;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [name, secs] : r.suite_seconds) per[name] = secs;
  j["suite_seconds"] = per;
  return j;
}

/// CSV with header row, comma separated, LF line endings, shortest
/// round-trip number formatting.
inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << io::format_double(row[i]);
    out << '\n';
  }
}

/// Writes every table of the report to dir/<table>.csv and returns the
/// file names written.
inline std::vector<std::string> emit_plot_data(const ExperimentReport& r,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::vector<std::string> names;
  for (const auto& t : r.tables) {
    const std::string name = t.name + ".csv";
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir / name).string() + "'");
    write_csv(out, t);
    if (!out) throw ConfigError("failed writing '" + (dir / name).string() + "'");
    names.push_back(name);
  }
  return names;
}

/// Human-readable one line per check.
inline void print_summary(std::ostream& out, const ExperimentReport& r) {
  for (const auto& c : r.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured="
        << io::format_double(c.measured) << " expected="
        << io::format_double(c.expected) << " tol="
        << io::format_double(c.tolerance) << " (" << to_string(c.comparison)
        << ", " << to_string(c.provenance) << ")";
    if (!c.note.empty()) out << "  " << c.note;
    out << '\n';
  }
  out << (r.passed() ? "all checks passed" : "some checks failed") << '\n';
}

}  // namespace psdo::harness
