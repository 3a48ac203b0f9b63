// Average teleportation and information-splitting fidelities with and without
// weak measurement reversal, against the classical limit 2/3.
#include <cstdio>
#include <numbers>

#include "wmr/wmr.hpp"

int main() {
  using namespace wmr;
  const double s = 0.3;
  for (int n : {4, 8}) {
    const GhzParams gp{std::numbers::pi / 2, n};
    std::printf("n = %d, s = %.1f\n%6s %10s %10s %10s %10s\n", n, s, "p", "F_tel(0)", "F_tel(opt)", "F_is(0)", "F_is(opt)");
    for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.2) {
      std::printf("%6.2f %10.6f %10.6f %10.6f %10.6f\n", p, fidelity_tel_unprotected(n, p),
                  optimize_quantity(Quantity::f_tel, gp, s, p, n / 2).value_opt, fidelity_is_unprotected(n, p),
                  optimize_quantity(Quantity::f_is, gp, s, p, n / 2).value_opt);
    }
    std::printf("\n");
  }
  const auto sim = average_teleportation_fidelity_dense(GhzParams{std::numbers::pi / 2, 4}, ProtocolParams{s, 0.4, 0.3, 2});
  std::printf("dense simulation n=4 p=0.4 r=0.3: %.10f, closed form %.10f\n", sim.f_avg, fidelity_tel_closed(4, s, 0.4, 0.3));
  return 0;
}
