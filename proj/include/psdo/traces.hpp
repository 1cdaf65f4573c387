#pragma once

// The two traces on order <= 0 symbols over the circle, evaluated from
// symbol data:
//
//   Wodzicki residue   res(a) = (2pi)^{-1} int_{S*S^1} tr a_{-1}
//   leading order      lo(a)  = int_{S*S^1} tr a_0
//
// with dx of total mass 2pi and counting measure on the two cosphere points,
// so vol(S*S^1) = 4pi.

#include <numbers>
#include <string_view>

#include "psdo/symbol.hpp"

namespace psdo {

enum class TraceKind { Wodzicki, LeadingOrder };

inline constexpr double kCircleLength = 2.0 * std::numbers::pi;
inline constexpr double kCosphereVolume = 2.0 * kCircleLength;

constexpr std::string_view to_string(TraceKind kind) {
  return kind == TraceKind::Wodzicki ? "wodzicki" : "leading-order";
}

/// tr ahat_{-1}^+(0) + tr ahat_{-1}^-(0); zero when the symbol has no -1 part.
inline Complex wodzicki_residue(const ClassicalSymbol& a) {
  if (a.truncation() < 1) return {};
  const auto& c = a.component(-1);
  return c.sheet(Sheet::Plus).mean_trace() + c.sheet(Sheet::Minus).mean_trace();
}

inline Complex leading_order_trace(const ClassicalSymbol& a) {
  const auto& c = a.component(0);
  return kCircleLength *
         (c.sheet(Sheet::Plus).mean_trace() + c.sheet(Sheet::Minus).mean_trace());
}

inline Complex trace(TraceKind kind, const ClassicalSymbol& a) {
  return kind == TraceKind::Wodzicki ? wodzicki_residue(a)
                                     : leading_order_trace(a);
}

}  // namespace psdo
