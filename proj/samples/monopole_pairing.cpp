// Pair the constant-loop curvature of the degree-m monopole with the sphere
// and recover m, with both normalizations shown.

#include <cstdio>

#include "psdo/gallery.hpp"

int main() {
  using namespace psdo;
  std::printf("%3s %14s %14s %10s %s\n", "m", "chern-weil", "lattice",
              "factor-err", "wodzicki");
  for (int m = -2; m <= 3; ++m) {
    const auto rec = loop_space_leading_chern(m, 128, 256);
    std::printf("%3d %14.10f %14.10f %10.2e %s\n", m, rec.normalized.real(),
                rec.normalized_lattice.real(), rec.factorization_error,
                rec.wodzicki_vanishes ? "0" : "nonzero");
  }
}
