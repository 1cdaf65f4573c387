#pragma once

// Plain-text symbol format.
//
//   psdo-symbol 1
//   rank <l>
//   truncation <K>
//   cutoff <F>
//   component <degree> <plus|minus>
//   <k> <row> <col> <re> <im>        one line per coefficient, k = -F..F
//   ...
//   end
//
// Every degree 0..-K appears once per sheet, plus sheet first. Numbers use
// the shortest representation that parses back to the same double, so
// write/read is bit-exact.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "psdo/errors.hpp"
#include "psdo/symbol.hpp"

namespace psdo {

namespace io {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw FormatError("cannot format double");
  return {buf, ptr};
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw FormatError("malformed number '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw FormatError("malformed integer '" + s + "'");
  return v;
}

inline std::string next_token(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw FormatError("unexpected end of input");
  return tok;
}

inline void expect(std::istream& in, const std::string& word) {
  const std::string tok = next_token(in);
  if (tok != word)
    throw FormatError("expected '" + word + "', found '" + tok + "'");
}

inline int expect_int(std::istream& in, const std::string& key) {
  expect(in, key);
  return parse_int(next_token(in));
}

}  // namespace io

inline void write_symbol(std::ostream& out, const ClassicalSymbol& a) {
  const int l = a.rank();
  const int f = a.cutoff();
  out << "psdo-symbol 1\n"
      << "rank " << l << "\ntruncation " << a.truncation() << "\ncutoff " << f
      << "\n";
  for (int p = 0; p <= a.truncation(); ++p) {
    for (Sheet s : kSheets) {
      out << "component " << -p << ' '
          << (s == Sheet::Plus ? "plus" : "minus") << '\n';
      const auto& series = a.component(-p).sheet(s);
      for (int k = -f; k <= f; ++k)
        for (int r = 0; r < l; ++r)
          for (int c = 0; c < l; ++c) {
            const Complex z = series.at(k, r, c);
            out << k << ' ' << r << ' ' << c << ' '
                << io::format_double(z.real()) << ' '
                << io::format_double(z.imag()) << '\n';
          }
    }
  }
  out << "end\n";
}

inline ClassicalSymbol read_symbol(std::istream& in) {
  io::expect(in, "psdo-symbol");
  if (io::parse_int(io::next_token(in)) != 1)
    throw FormatError("unsupported symbol format version");
  const int l = io::expect_int(in, "rank");
  const int truncation = io::expect_int(in, "truncation");
  const int f = io::expect_int(in, "cutoff");
  if (l < 1 || truncation < 0 || f < 0)
    throw FormatError("invalid symbol header");
  ClassicalSymbol a(l, truncation, f);
  for (int p = 0; p <= truncation; ++p) {
    for (Sheet s : kSheets) {
      if (io::expect_int(in, "component") != -p)
        throw FormatError("components out of order");
      io::expect(in, s == Sheet::Plus ? "plus" : "minus");
      auto& series = a.component(-p).sheet(s);
      for (int k = -f; k <= f; ++k)
        for (int r = 0; r < l; ++r)
          for (int c = 0; c < l; ++c) {
            if (io::parse_int(io::next_token(in)) != k ||
                io::parse_int(io::next_token(in)) != r ||
                io::parse_int(io::next_token(in)) != c)
              throw FormatError("coefficient index out of order");
            const double re = io::parse_double(io::next_token(in));
            const double im = io::parse_double(io::next_token(in));
            series.at(k, r, c) = {re, im};
          }
    }
  }
  io::expect(in, "end");
  return a;
}

inline std::string to_string(const ClassicalSymbol& a) {
  std::ostringstream os;
  write_symbol(os, a);
  return os.str();
}

inline ClassicalSymbol symbol_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_symbol(is);
}

}  // namespace psdo
