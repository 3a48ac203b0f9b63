// Protects a four-qubit GHZ state against amplitude damping and compares the
// closed-form measures with a dense density-matrix simulation.
#include <cstdio>
#include <numbers>

#include "wmr/wmr.hpp"

int main() {
  using namespace wmr;
  const GhzParams gp{std::numbers::pi / 3, 4};
  const double s = 0.5;
  const int m = 2;

  std::printf("%6s %10s %10s %10s %10s %10s %10s\n", "p", "E_LN(0)", "E_LN(opt)", "r_opt", "T", "E_MW(opt)", "dense LN");
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto bare = curve_point(Quantity::e_ln, gp, s, p, m, true);
    const auto ln = optimize_quantity(Quantity::e_ln, gp, s, p, m);
    const auto mw = optimize_quantity(Quantity::e_mw, gp, s, p, m);
    const DenseState rho = apply_protocol_dense(make_gghz(gp), s, p, ln.r_opt);
    std::printf("%6.2f %10.6f %10.6f %10.6f %10.6f %10.6f %10.6f\n", p, bare.value_opt, ln.value_opt, ln.r_opt,
                ln.transmissivity_at_opt, mw.value_opt, ln_dense(rho, m).e_ln);
  }

  const GhzParams weak_head{2 * std::numbers::pi / 3, 4};
  std::printf("\ncritical damping (theta = 2pi/3): LN %.6f unprotected, %.6f with s = %.1f\n",
              critical_p_closed_form(weak_head, 0.0, MeasureKind::ln), critical_p_closed_form(weak_head, s, MeasureKind::ln), s);
  return 0;
}
