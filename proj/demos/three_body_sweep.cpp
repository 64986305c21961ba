// Three-boson ground-state energy across 1 <= d <= 3 for the shipped short-range presets,
// with the b_ho/r_2D of a 3D->1D squeeze that gives the same dimension.

#include <cstdio>

#include "dsqueeze/equivalence.hpp"

int main() {
  using namespace dsq;
  MatchOptions o;
  o.K_max = 8;
  for (const auto& name : short_range_preset_names()) {
    const auto p = preset(name);
    std::printf("%s\n%8s %14s %12s\n", name.c_str(), "d", "E_d", "b_ho/r_2D");
    for (double d : {1.0, 1.25, 1.5, 2.0, 2.5, 2.75, 3.0}) {
      const double E = d_energy(3, d, p, o);
      if (d > 1.0 && d < 3.0)
        std::printf("%8.3f %14.8f %12.5f\n", d, E, bho_over_rms({3, 1}, d, 3).over_r2d);
      else
        std::printf("%8.3f %14.8f %12s\n", d, E, d == 1.0 ? "0" : "inf");
    }
    std::printf("\n");
  }
  return 0;
}
