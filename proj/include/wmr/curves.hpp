#pragma once

// Optimized-over-r curves of every protected quantity, and their numeric
// critical damping values.

#include <cmath>
#include <string>

#include "wmr/fidelity.hpp"
#include "wmr/measures.hpp"
#include "wmr/optimizer.hpp"
#include "wmr/params.hpp"

namespace wmr {

enum class Quantity { e_ln, e_mw, f_tel, f_is };

inline std::string to_string(Quantity q) {
  switch (q) {
  case Quantity::e_ln: return "ln";
  case Quantity::e_mw: return "mw";
  case Quantity::f_tel: return "tel";
  case Quantity::f_is: return "is";
  }
  return "?";
}

inline bool is_fidelity(Quantity q) { return q == Quantity::f_tel || q == Quantity::f_is; }

/// Threshold used for the numeric critical damping value of each quantity.
inline double critical_threshold(Quantity q) { return is_fidelity(q) ? kClassicalFidelity : kDeathThreshold; }

/// Value of a quantity at fixed (s, p, r). Fidelities use the symmetric GHZ
/// resource; m is only used by the logarithmic negativity.
inline double evaluate_quantity(Quantity q, const GhzParams& gp, double s, double p, double r, int m) {
  switch (q) {
  case Quantity::e_ln: return ln_block_eigenvalue(gp, ProtocolParams{s, p, r, m}).e_ln;
  case Quantity::e_mw: return mw_global_entanglement(gp, ProtocolParams{s, p, r, m}).e_mw;
  case Quantity::f_tel: return fidelity_tel_closed(gp.n, s, p, r);
  case Quantity::f_is: return fidelity_is_closed(gp.n, s, p, r);
  }
  return NAN;
}

/// Maximizes the quantity over the reversal strength and records the
/// transmissivity at the optimum.
inline OptResult optimize_quantity(Quantity q, const GhzParams& gp, double s, double p, int m, const MaximizeOptions& opt = {}) {
  OptResult res = maximize_over_r([&](double r) { return evaluate_quantity(q, gp, s, p, r, m); }, opt);
  const GhzParams resource = is_fidelity(q) ? GhzParams{std::numbers::pi / 2, gp.n} : gp;
  res.transmissivity_at_opt = transmissivity(resource, s, p, res.r_opt);
  return res;
}

/// One point of a plotted curve. With `unprotected` set the protocol is off
/// (s = r = 0) and no optimization happens.
inline OptResult curve_point(Quantity q, const GhzParams& gp, double s, double p, int m, bool unprotected) {
  if (unprotected) {
    OptResult res;
    res.r_opt = 0.0;
    res.value_opt = evaluate_quantity(q, gp, 0.0, p, 0.0, m);
    res.transmissivity_at_opt = 1.0;
    res.evaluations = 1;
    return res;
  }
  return optimize_quantity(q, gp, s, p, m);
}

/// Numeric critical damping value of the curve on [p_lo, p_hi].
inline CriticalResult critical_p_numeric(Quantity q, const GhzParams& gp, double s, int m, bool unprotected, double p_lo = 0.0,
                                         double p_hi = 1.0) {
  return find_critical_p([&](double p) { return curve_point(q, gp, s, p, m, unprotected).value_opt; }, critical_threshold(q), p_lo,
                         p_hi);
}

} // namespace wmr
