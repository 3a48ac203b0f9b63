#pragma once

// Logarithmic negativity and Meyer-Wallach global entanglement of the
// (protected) amplitude-damped gGHZ family, in closed form and via the dense engine.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wmr/dense.hpp"
#include "wmr/errors.hpp"
#include "wmr/params.hpp"

namespace wmr {

struct LnResult {
  double epsilon_m = 0.0; ///< the only partial-transpose eigenvalue that can be negative
  double negativity = 0.0;
  double e_ln = 0.0;
  int m = 0;
};

struct MwResult {
  double c_n = 0.0;
  double e_mw = 0.0;
  std::array<double, 3> lambda{}; ///< lambda_1, lambda_2 and the repeated lambda_j of R_n
};

enum class MeasureKind { ln, mw };

inline LnResult make_ln_result(double epsilon, int m) {
  LnResult res;
  res.epsilon_m = epsilon;
  res.m = m;
  res.negativity = std::max(0.0, -epsilon);
  res.e_ln = std::log1p(2.0 * res.negativity) / std::numbers::ln2;
  return res;
}

namespace detail {

inline double log_add(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

// (B - sqrt(B^2 + X4)) written without cancellation; B >= 0.
inline double stable_lower_root(double big_b, double x4) {
  const double disc = std::max(0.0, big_b * big_b + x4);
  const double root = std::sqrt(disc);
  if (big_b > 0.0) {
    const double den = big_b + root;
    return den > 0.0 ? -x4 / den : 0.0;
  }
  return big_b - root;
}

// Lower eigenvalue of the 2x2 partial-transpose block of the protected state,
// expanded over the common factor 1/T so that no intermediate normalization is needed:
//   eps = [B - sqrt(B^2 + 4X)] / (2T)
//   B = beta^2 sbar^n b1,   b1 = (p rbar)^m pbar^(n-m) + (p rbar)^(n-m) pbar^m
//   X = beta^2 sbar^n (rbar pbar)^n (alpha^2 - beta^2 sbar^n p^n)
// No range checks: for even n the expression continues smoothly past p = 1.
inline double block_eigenvalue_direct(double a2, double b2, int n, int m, double s, double p, double r) {
  const double sb = 1.0 - s, pb = 1.0 - p, rb = 1.0 - r;
  const double sn = std::pow(sb, n);
  const double pr = p * rb;
  const double b1 = std::pow(pr, m) * std::pow(pb, n - m) + std::pow(pr, n - m) * std::pow(pb, m);
  const double big_b = b2 * sn * b1;
  const double x4 = 4.0 * b2 * sn * std::pow(rb * pb, n) * (a2 - b2 * sn * std::pow(p, n));
  const double t = a2 * std::pow(rb, n) + b2 * sn * std::pow(1.0 - p * r, n);
  if (big_b >= 0.0) return stable_lower_root(big_b, x4) / (2.0 * t);
  return (big_b - std::sqrt(std::max(0.0, big_b * big_b + x4))) / (2.0 * t);
}

// Same quantity evaluated with every power carried as a logarithm, for large n
// where pbar^n and sbar^n underflow. Requires p in [0, 1].
inline double block_eigenvalue_logspace(double a2, double b2, int n, int m, double s, double p, double r) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const double ls = std::log(1.0 - s), lp = std::log(p), lpb = std::log(1.0 - p), lrb = std::log(1.0 - r);
  auto lpow = [](double lx, int k) { return k == 0 ? 0.0 : k * lx; };
  const double lpr = lp + lrb;
  const double lb1 = log_add(lpow(lpr, m) + lpow(lpb, n - m), lpow(lpr, n - m) + lpow(lpb, m));
  const double lbig_b = std::log(b2) + n * ls + lb1;

  // log|alpha^2 - beta^2 sbar^n p^n| and its sign
  const double la = std::log(a2);
  const double lq = std::log(b2) + n * ls + lpow(lp, n);
  double ldiff = ninf;
  double sign = 0.0;
  if (la > lq) {
    ldiff = la + std::log1p(-std::exp(lq - la));
    sign = 1.0;
  } else if (lq > la) {
    ldiff = lq + std::log1p(-std::exp(la - lq));
    sign = -1.0;
  }
  const double lx4 = std::log(4.0) + std::log(b2) + n * ls + lpow(lrb + lpb, n) + ldiff;

  const double scale = std::max(lbig_b, 0.5 * lx4);
  if (scale == ninf) return 0.0;
  const double big_b = lbig_b == ninf ? 0.0 : std::exp(lbig_b - scale);
  const double x4 = (lx4 == ninf) ? 0.0 : sign * std::exp(lx4 - 2.0 * scale);
  const double bracket = stable_lower_root(big_b, x4);

  const double lt = log_add(la + lpow(lrb, n), std::log(b2) + n * ls + lpow(std::log1p(-p * r), n));
  return 0.5 * bracket * std::exp(scale - lt);
}

inline constexpr int kLogSpaceThreshold = 50;

} // namespace detail

/// Closed-form logarithmic negativity across the m | (n - m) cut of the
/// protected state. With s = r = 0 this is the unprotected damped gGHZ result.
inline LnResult ln_block_eigenvalue(const GhzParams& gp, const ProtocolParams& pp) {
  gp.validate();
  pp.validate(gp.n);
  const double a = gp.alpha(), b = gp.beta();
  if (b == 0.0) return make_ln_result(0.0, pp.m); // product state |0...0>
  const double a2 = a * a, b2 = b * b;
  const double eps = gp.n > detail::kLogSpaceThreshold
                         ? detail::block_eigenvalue_logspace(a2, b2, gp.n, pp.m, pp.s, pp.p, pp.r)
                         : detail::block_eigenvalue_direct(a2, b2, gp.n, pp.m, pp.s, pp.p, pp.r);
  return make_ln_result(eps, pp.m);
}

/// Logarithmic negativity from the full partial-transpose spectrum across the
/// cut separating the first m qubits. epsilon_m reports the smallest eigenvalue.
inline LnResult ln_dense(const DenseState& st, int m) {
  detail::require(m >= 1 && m <= st.n - 1, "ln_dense: bipartition m must lie in [1, n-1]");
  const DenseState rho = st.normalized ? st : normalize(st);
  const auto eig = herm_eigenvalues(partial_transpose(rho, leading_mask(m)).matrix);
  double neg = 0.0;
  for (double ev : eig.eigenvalues)
    if (ev < 0.0) neg -= ev;
  LnResult res;
  res.m = m;
  res.epsilon_m = eig.eigenvalues.back();
  res.negativity = neg;
  res.e_ln = std::log1p(2.0 * neg) / std::numbers::ln2;
  return res;
}

namespace detail {

// (2^(n-1) - 1) * x^(n/2) without overflowing 2^(n-1)
inline double ghz_tangle_penalty(int n, double x) {
  if (n <= 1000) return (std::ldexp(1.0, n - 1) - 1.0) * std::pow(x, 0.5 * n);
  if (x <= 0.0) return 0.0;
  return std::exp((n - 1) * std::numbers::ln2 + std::log1p(-std::ldexp(1.0, 1 - n)) + 0.5 * n * std::log(x));
}

} // namespace detail

/// n-concurrence and global entanglement of the protected damped gGHZ state (even n).
inline MwResult mw_global_entanglement(const GhzParams& gp, const ProtocolParams& pp) {
  gp.validate();
  pp.validate_strengths();
  if (gp.n % 2 != 0) throw UnsupportedMeasure("mw_global_entanglement: n-concurrence route requires even n, got " + std::to_string(gp.n));
  const int n = gp.n;
  const double a = gp.alpha(), b = gp.beta();
  const double sb = pp.s_bar(), pb = pp.p_bar(), rb = pp.r_bar(), p = pp.p;
  const double t = transmissivity(gp, pp.s, pp.p, pp.r);

  MwResult res;
  // C_n = 2 (sbar rbar pbar)^(n/2) / T * [alpha beta - (2^(n-1) - 1) beta^2 (sbar p)^(n/2)]
  const double prefactor = 2.0 * std::pow(sb * rb * pb, 0.5 * n) / t;
  const double bracket = a * b - b * b * detail::ghz_tangle_penalty(n, sb * p);
  res.c_n = std::max(0.0, prefactor * bracket);
  res.e_mw = res.c_n * res.c_n;

  const double t1 = weak_success_probability(gp, pp.s);
  const double a1 = a * a / t1;
  const double b1 = std::pow(sb, n) * b * b / t1;
  const double t2 = t / t1;
  const double pn = std::pow(p, n);
  const double k = b1 * std::pow(pb * rb, n) / (t2 * t2);
  const double mid = 2.0 * a1 + b1 * pn;
  const double split = 2.0 * std::sqrt(a1 * (a1 + b1 * pn));
  res.lambda = {k * (mid + split), k * (mid - split), b1 * b1 * std::pow(p * pb * rb, n) / (t2 * t2)};
  return res;
}

/// n-concurrence from the spectrum of R = rho (Y rho* Y), Y = sigma_y^(x)n.
/// With rho = F F^dagger (F = V sqrt(D)), the square roots of the eigenvalues
/// of R are the singular values of F^dagger Y F*, which are taken directly so
/// that near-zero eigenvalues do not turn rounding noise into sqrt(eps) errors.
/// Eigenvalues of rho within rounding of zero are clamped to zero.
inline MwResult mw_dense(const DenseState& st) {
  if (st.n % 2 != 0) throw UnsupportedMeasure("mw_dense: n-concurrence route requires even n, got " + std::to_string(st.n));
  const DenseState rho = st.normalized ? st : normalize(st);

  const CMatrix sigma_y = CMatrix::from_rows({{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}});
  CMatrix y = sigma_y;
  for (int q = 1; q < rho.n; ++q) y = kron(y, sigma_y);

  const auto eig = herm_eigen(rho.matrix, true);
  const CMatrix& v = *eig.eigenvectors;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues[i] < -1e-9) throw NumericalError("mw_dense: state has a significantly negative eigenvalue " + std::to_string(eig.eigenvalues[i]));
    if (eig.eigenvalues[i] > 0.0) kept.push_back(i);
  }
  CMatrix f(rho.dim(), std::max<std::size_t>(kept.size(), 1));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const double w = std::sqrt(eig.eigenvalues[kept[c]]);
    for (std::size_t k = 0; k < rho.dim(); ++k) f(k, c) = v(k, kept[c]) * w;
  }
  const auto sv = singular_values(f.adjoint() * y * f.conjugate());

  double c = sv.empty() ? 0.0 : sv[0];
  for (std::size_t i = 1; i < sv.size(); ++i) c -= sv[i];

  MwResult res;
  res.c_n = std::max(0.0, c);
  res.e_mw = res.c_n * res.c_n;
  for (std::size_t i = 0; i < 3 && i < sv.size(); ++i) res.lambda[i] = sv[i] * sv[i];
  return res;
}

/// Damping strength beyond which the closed-form measure vanishes (capped at 1).
inline double critical_p_closed_form(const GhzParams& gp, double s, MeasureKind kind) {
  gp.validate();
  detail::require(s >= 0.0 && s < 1.0, "critical_p_closed_form: s must lie in [0, 1)");
  const double a = gp.alpha(), b = gp.beta();
  if (b == 0.0) return 1.0;
  const int n = gp.n;
  double log_ratio = std::log(a) - std::log(b);
  if (kind == MeasureKind::mw) {
    if (n % 2 != 0) throw UnsupportedMeasure("critical_p_closed_form: MW kind requires even n");
    log_ratio -= (n - 1) * std::numbers::ln2 + std::log1p(-std::ldexp(1.0, 1 - n));
  }
  const double pc = std::exp(2.0 / n * log_ratio) / (1.0 - s);
  return std::min(1.0, pc);
}

/// Uncapped sign-change location of the protected block eigenvalue,
/// (1/sbar) (|alpha|/|beta|)^(2/n).
inline double ln_sign_boundary(const GhzParams& gp, double s) {
  gp.validate();
  detail::require(gp.beta() > 0.0, "ln_sign_boundary: beta must be nonzero");
  return std::pow(gp.alpha() / gp.beta(), 2.0 / gp.n) / (1.0 - s);
}

} // namespace wmr
