// Compose two random symbols, quantize, and watch the composition defect
// shrink as the mode cutoff grows.

#include <cstdio>

#include "psdo/gallery.hpp"
#include "psdo/quantize.hpp"
#include "psdo/seminorm.hpp"

int main() {
  using namespace psdo;
  Rng rng(7);
  // Bandwidth F/2 keeps every product inside the cutoff, so a#b is exact.
  RandomSymbolOptions opts;
  opts.bandwidth = 4;
  const ClassicalSymbol a = random_symbol(rng, 2, 3, 8, opts);
  const ClassicalSymbol b = random_symbol(rng, 2, 3, 8, opts);

  const ClassicalSymbol ab = compose(a, b, 3);
  std::printf("|a|_(1,2,1) = %.6g, |a#b|_(1,2,1) = %.6g\n",
              seminorm(a, 1, 2, 1), seminorm(ab, 1, 2, 1));

  // a(x, xi) b(x, xi) agrees with a#b only at leading order.
  const double x = 0.3, xi = 40.0;
  const auto pointwise = a.evaluate(x, xi) * b.evaluate(x, xi);
  std::printf("|a#b - ab| at (%.1f, %.0f) = %.3g\n", x, xi,
              (ab.evaluate(x, xi) - pointwise).norm());

  for (int modes : {32, 64, 128}) {
    const OperatorMatrix d = composition_defect(a, b, 3, modes);
    std::printf("J = %3d  mid-band defect = %.4e\n", modes,
                mid_band_defect_norm(d));
  }
}
