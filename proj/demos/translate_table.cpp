// Closed-form dimension, frequency ratio and scale factor for the three two-body transitions.

#include <cstdio>

#include "dsqueeze/oscillator.hpp"

int main() {
  using namespace dsq;
  std::printf("%-6s %8s %10s %12s %12s %8s\n", "trans", "x", "d", "b_ho/r_2D", "b_ho/r_1D", "s");
  for (Transition t : {Transition{3, 2}, Transition{3, 1}, Transition{2, 1}}) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      const double d = symmetric_dimension(t, x);
      const auto r = bho_over_rms(t, d, 2);
      std::printf("%-6s %8.3f %10.6f %12.6f ", t.label().c_str(), x, d, r.over_r2d);
      if (r.over_r1d)
        std::printf("%12.6f", *r.over_r1d);
      else
        std::printf("%12s", "-");
      std::printf(" %8.5f\n", scale_from_ratio(x));
    }
  }
  return 0;
}
