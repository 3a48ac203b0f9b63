#pragma once

// Exact O(n) representation of the GHZ-structured mixed states produced by
// local weak measurement, amplitude damping and reversal acting on a gGHZ state.
//
//   rho = a |0..0><0..0| + c (|0..0><1..1| + h.c.)
//       + sum_k diag_weight[k] * (sum of |x><x| over patterns x with k zeros)
//
// The all-zeros pattern appears twice (the a corner and diag_weight[n]); the two
// are kept apart and only summed when reading matrix entries.

#include <bit>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wmr/dense.hpp"
#include "wmr/errors.hpp"
#include "wmr/params.hpp"

namespace wmr {

struct CompactGhzState {
  int n = 0;
  double a = 0.0;
  std::vector<double> diag_weight; // index k = number of zeros in the pattern, size n + 1
  double c = 0.0;
  double norm = 1.0;               // product of the success probabilities applied so far

  double trace() const;
};

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  return b;
}

} // namespace detail

inline double CompactGhzState::trace() const {
  double t = a;
  for (int k = 0; k <= n; ++k) t += detail::binomial(n, k) * diag_weight[static_cast<std::size_t>(k)];
  return t;
}

inline CompactGhzState compact_from_gghz(const GhzParams& gp) {
  gp.validate();
  CompactGhzState st;
  st.n = gp.n;
  st.a = gp.alpha() * gp.alpha();
  st.diag_weight.assign(static_cast<std::size_t>(gp.n) + 1, 0.0);
  st.diag_weight[0] = gp.beta() * gp.beta();
  st.c = gp.alpha() * gp.beta();
  st.norm = 1.0;
  return st;
}

/// Null-result weak measurement on every qubit: each |1> factor picks up sbar.
inline CompactGhzState compact_apply_weak(CompactGhzState st, double s) {
  detail::require(s >= 0.0 && s < 1.0, "compact_apply_weak: s must lie in [0, 1)");
  const double before = st.trace();
  const double sb = 1.0 - s;
  for (int k = 0; k <= st.n; ++k) st.diag_weight[static_cast<std::size_t>(k)] *= std::pow(sb, st.n - k);
  st.c *= std::pow(sb, 0.5 * st.n);
  st.norm *= st.trace() / before;
  return st;
}

/// Amplitude damping on every qubit. Populations flow from patterns with k zeros
/// to every pattern with k' >= k zeros that covers them; trace is preserved.
inline CompactGhzState compact_apply_damping(CompactGhzState st, double p) {
  detail::require(p >= 0.0 && p <= 1.0, "compact_apply_damping: p must lie in [0, 1]");
  const int n = st.n;
  const double pb = 1.0 - p;
  std::vector<double> next(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    const double w = st.diag_weight[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    for (int kk = k; kk <= n; ++kk)
      next[static_cast<std::size_t>(kk)] += w * detail::binomial(kk, kk - k) * std::pow(p, kk - k) * std::pow(pb, n - kk);
  }
  st.diag_weight = std::move(next);
  st.c *= std::pow(pb, 0.5 * n);
  return st;
}

/// Post-selected reversal on every qubit: each |0> factor picks up rbar.
inline CompactGhzState compact_apply_reversal(CompactGhzState st, double r) {
  detail::require(r >= 0.0 && r < 1.0, "compact_apply_reversal: r must lie in [0, 1)");
  const double before = st.trace();
  const double rb = 1.0 - r;
  for (int k = 0; k <= st.n; ++k) st.diag_weight[static_cast<std::size_t>(k)] *= std::pow(rb, k);
  st.a *= std::pow(rb, st.n);
  st.c *= std::pow(rb, 0.5 * st.n);
  st.norm *= st.trace() / before;
  return st;
}

/// Canonical protocol order: weak measurement, damping, reversal.
inline CompactGhzState compact_protocol(const GhzParams& gp, double s, double p, double r) {
  auto st = compact_from_gghz(gp);
  st = compact_apply_weak(std::move(st), s);
  st = compact_apply_damping(std::move(st), p);
  return compact_apply_reversal(std::move(st), r);
}

/// Weight of the |0..0><0..0| entry (the a corner plus the all-zeros pattern).
inline double all_zeros_population(const CompactGhzState& st) { return st.a + st.diag_weight.back(); }

inline DenseState compact_to_dense(const CompactGhzState& st) {
  check_dense_size(st.n);
  const std::size_t dim = std::size_t{1} << st.n;
  DenseState out{st.n, CMatrix(dim), st.norm == 1.0};
  for (std::size_t i = 0; i < dim; ++i) {
    const int ones = std::popcount(i);
    out.matrix(i, i) = st.diag_weight[static_cast<std::size_t>(st.n - ones)];
  }
  out.matrix(0, 0) += st.a;
  out.matrix(0, dim - 1) += st.c;
  out.matrix(dim - 1, 0) += st.c;
  return out;
}

} // namespace wmr
