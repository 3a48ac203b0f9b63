#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "wmr/errors.hpp"
#include "wmr/params.hpp"

namespace wmr {

struct OptResult {
  double r_opt = 0.0;
  double value_opt = 0.0;
  double transmissivity_at_opt = 1.0;
  std::size_t evaluations = 0;
};

struct CriticalResult {
  double p_critical = 0.0;
  double threshold_used = 0.0;
  double bracket_width = 0.0;
};

struct MaximizeOptions {
  double r_max = 1.0 - 1e-9;   ///< upper end of the search interval
  std::size_t grid_points = 201;
  double tolerance = 1e-7;     ///< final golden-section interval width in r
};

/// Maximizes a scalar objective over the reversal strength r in [0, r_max].
///
/// A uniform grid locates the best cell; golden-section search then refines
/// inside the neighbouring cells. Ties go to the smallest r, and the refined
/// point only replaces the grid winner if it is strictly better, so the result
/// never loses to any grid point (in particular r = 0).
inline OptResult maximize_over_r(const std::function<double(double)>& objective, const MaximizeOptions& opt = {}) {
  detail::require(opt.grid_points >= 2, "maximize_over_r: need at least two grid points");
  detail::require(opt.r_max > 0.0 && opt.r_max < 1.0, "maximize_over_r: r_max must lie in (0, 1)");

  OptResult res;
  auto eval = [&](double r) {
    ++res.evaluations;
    const double v = objective(r);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "maximize_over_r: objective is not finite at r = " << r;
      throw NumericalError(msg.str());
    }
    return v;
  };

  const std::size_t last = opt.grid_points - 1;
  const double step = opt.r_max / static_cast<double>(last);
  std::size_t best_i = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= last; ++i) {
    const double r = (i == last) ? opt.r_max : step * static_cast<double>(i);
    const double v = eval(r);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  res.r_opt = (best_i == last) ? opt.r_max : step * static_cast<double>(best_i);
  res.value_opt = best_v;

  double lo = best_i == 0 ? 0.0 : step * static_cast<double>(best_i - 1);
  double hi = best_i == last ? opt.r_max : std::min(opt.r_max, step * static_cast<double>(best_i + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (hi - lo > opt.tolerance) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(x2);
    }
  }
  const double x_ref = f1 >= f2 ? x1 : x2;
  const double f_ref = f1 >= f2 ? f1 : f2;
  if (f_ref > res.value_opt) {
    res.r_opt = x_ref;
    res.value_opt = f_ref;
  }
  return res;
}

/// Bisection for a sign change of f on [lo, hi] down to the requested width.
/// Returns the final bracket.
inline std::pair<double, double> bisect_sign_change(const std::function<double(double)>& f, double lo, double hi, double width) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo * fhi < 0.0)) throw BracketError("bisect_sign_change: no sign change on the bracket");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

/// Locates where an (optimized) curve falls to or below `threshold`. Requires
/// curve(p_lo) > threshold >= curve(p_hi); the returned point is the bracket midpoint.
inline CriticalResult find_critical_p(const std::function<double(double)>& curve, double threshold, double p_lo, double p_hi,
                                      double width = 1e-5) {
  detail::require(p_lo < p_hi, "find_critical_p: need p_lo < p_hi");
  const double f_lo = curve(p_lo);
  const double f_hi = curve(p_hi);
  if (!(f_lo > threshold) || !(f_hi <= threshold)) {
    std::ostringstream msg;
    msg << "find_critical_p: curve does not cross " << threshold << " on [" << p_lo << ", " << p_hi << "] (values " << f_lo
        << ", " << f_hi << ")";
    throw BracketError(msg.str());
  }
  double lo = p_lo, hi = p_hi;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (curve(mid) > threshold)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), threshold, hi - lo};
}

} // namespace wmr
