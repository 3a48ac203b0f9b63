#pragma once

// Cross-engine equivalence checks: closed forms and the compact engine against
// the dense density-matrix simulator.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "wmr/dense.hpp"
#include "wmr/fidelity.hpp"
#include "wmr/ghz_compact.hpp"
#include "wmr/measures.hpp"
#include "wmr/parallel.hpp"
#include "wmr/params.hpp"

namespace wmr {

struct OracleCheck {
  std::string name;
  int n = 0;
  std::size_t points = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string worst_point; ///< parameters at the largest deviation

  bool passed() const { return points > 0 && max_deviation <= tolerance; }
};

struct OracleGrid {
  std::vector<int> n;
  std::vector<double> theta;
  std::vector<double> s;
  std::vector<double> p;
  std::vector<double> r;
};

/// Grid used for the measure and transmissivity checks.
inline OracleGrid measure_oracle_grid(bool quick = false) {
  const double pi = std::numbers::pi;
  OracleGrid g;
  g.n = quick ? std::vector<int>{3, 4, 5, 6} : std::vector<int>{3, 4, 5, 6, 7, 8};
  g.theta = {pi / 6, pi / 3, pi / 2, 2 * pi / 3};
  g.s = {0.0, 0.3, 0.6};
  for (int i = 0; i <= 9; i += quick ? 3 : 1) g.p.push_back(0.1 * i);
  g.r = {0.0, 0.2, 0.5};
  return g;
}

/// Grid used for the fidelity checks (symmetric GHZ resource).
inline OracleGrid fidelity_oracle_grid(bool quick = false) {
  OracleGrid g;
  g.n = quick ? std::vector<int>{3, 4} : std::vector<int>{3, 4, 5, 6};
  g.theta = {std::numbers::pi / 2};
  g.s = {0.0, 0.3, 0.6};
  g.p = quick ? std::vector<double>{0.0, 0.4, 1.0} : std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  g.r = quick ? std::vector<double>{0.0, 0.5} : std::vector<double>{0.0, 0.2, 0.5, 0.8};
  return g;
}

namespace detail {

struct Deviation {
  double value = 0.0;
  std::string where;
};

struct GridPoint {
  double theta, s, p, r;
};

inline std::vector<GridPoint> flatten(const OracleGrid& g) {
  std::vector<GridPoint> pts;
  for (double th : g.theta)
    for (double s : g.s)
      for (double p : g.p)
        for (double r : g.r) pts.push_back({th, s, p, r});
  return pts;
}

inline std::string describe(int n, const GridPoint& x, int m = 0) {
  char buf[160];
  if (m > 0)
    std::snprintf(buf, sizeof buf, "n=%d theta=%.6g s=%.6g p=%.6g r=%.6g m=%d", n, x.theta, x.s, x.p, x.r, m);
  else
    std::snprintf(buf, sizeof buf, "n=%d theta=%.6g s=%.6g p=%.6g r=%.6g", n, x.theta, x.s, x.p, x.r);
  return buf;
}

template <class F>
OracleCheck run_check(const std::string& name, int n, double tol, const std::vector<GridPoint>& pts, F&& deviation_at) {
  const auto devs = parallel_map(pts.size(), [&](std::size_t i) { return deviation_at(pts[i]); });
  OracleCheck chk{name, n, pts.size(), 0.0, tol, {}};
  for (const auto& d : devs) {
    if (!(d.value <= chk.max_deviation)) { // NaN counts as the worst point
      chk.max_deviation = std::isnan(d.value) ? INFINITY : d.value;
      chk.worst_point = d.where;
    }
  }
  return chk;
}

inline void keep_worst(Deviation& acc, double v, const std::string& where) {
  if (std::isnan(v)) v = INFINITY;
  if (v > acc.value) acc = {v, where};
}

} // namespace detail

/// Closed-form logarithmic negativity against the dense partial-transpose
/// spectrum, over every bipartition m.
inline std::vector<OracleCheck> check_ln_oracle(const OracleGrid& g, double tol = 1e-9) {
  const auto pts = detail::flatten(g);
  std::vector<OracleCheck> out;
  for (int n : g.n)
    out.push_back(detail::run_check("ln_closed_vs_dense", n, tol, pts, [n](const detail::GridPoint& x) {
      const GhzParams gp{x.theta, n};
      const DenseState rho = apply_protocol_dense(make_gghz(gp), x.s, x.p, x.r);
      detail::Deviation d;
      for (int m = 1; m < n; ++m) {
        const LnResult closed = ln_block_eigenvalue(gp, ProtocolParams{x.s, x.p, x.r, m});
        const LnResult dense = ln_dense(rho, m);
        detail::keep_worst(d, std::max(std::abs(closed.e_ln - dense.e_ln), std::abs(closed.negativity - dense.negativity)),
                           detail::describe(n, x, m));
      }
      return d;
    }));
  return out;
}

/// Closed-form n-concurrence against the dense R_n spectrum (even n only).
inline std::vector<OracleCheck> check_mw_oracle(const OracleGrid& g, double tol = 1e-9) {
  const auto pts = detail::flatten(g);
  std::vector<OracleCheck> out;
  for (int n : g.n) {
    if (n % 2 != 0) continue;
    out.push_back(detail::run_check("mw_closed_vs_dense", n, tol, pts, [n](const detail::GridPoint& x) {
      const GhzParams gp{x.theta, n};
      const MwResult closed = mw_global_entanglement(gp, ProtocolParams{x.s, x.p, x.r, n / 2});
      const MwResult dense = mw_dense(apply_protocol_dense(make_gghz(gp), x.s, x.p, x.r));
      return detail::Deviation{std::max(std::abs(closed.c_n - dense.c_n), std::abs(closed.e_mw - dense.e_mw)), detail::describe(n, x)};
    }));
  }
  return out;
}

/// Elementwise agreement of the compact pipeline expansion with the dense pipeline.
inline std::vector<OracleCheck> check_compact_oracle(const OracleGrid& g, double tol = 1e-12) {
  const auto pts = detail::flatten(g);
  std::vector<OracleCheck> out;
  for (int n : g.n)
    out.push_back(detail::run_check("compact_vs_dense", n, tol, pts, [n](const detail::GridPoint& x) {
      const GhzParams gp{x.theta, n};
      const DenseState dense = apply_protocol_dense(make_gghz(gp), x.s, x.p, x.r);
      const DenseState expanded = compact_to_dense(compact_protocol(gp, x.s, x.p, x.r));
      return detail::Deviation{max_abs_diff(dense.matrix, expanded.matrix), detail::describe(n, x)};
    }));
  return out;
}

/// Accumulated compact norm and dense trace against the closed-form transmissivity.
inline std::vector<OracleCheck> check_transmissivity_oracle(const OracleGrid& g, double tol = 1e-12) {
  const auto pts = detail::flatten(g);
  std::vector<OracleCheck> out;
  for (int n : g.n)
    out.push_back(detail::run_check("transmissivity", n, tol, pts, [n](const detail::GridPoint& x) {
      const GhzParams gp{x.theta, n};
      const double t = transmissivity(gp, x.s, x.p, x.r);
      const double norm = compact_protocol(gp, x.s, x.p, x.r).norm;
      const double dense = apply_protocol_dense(make_gghz(gp), x.s, x.p, x.r).trace();
      return detail::Deviation{std::max(std::abs(norm - t), std::abs(dense - t)), detail::describe(n, x)};
    }));
  return out;
}

/// Closed-form average fidelity against the Haar-averaged dense protocol.
inline std::vector<OracleCheck> check_fidelity_oracle(FidelityKind kind, const OracleGrid& g, double tol = 1e-8) {
  const auto pts = detail::flatten(g);
  std::vector<OracleCheck> out;
  const std::string name = kind == FidelityKind::tel ? "tel_closed_vs_dense" : "is_closed_vs_dense";
  for (int n : g.n)
    out.push_back(detail::run_check(name, n, tol, pts, [n, kind](const detail::GridPoint& x) {
      const GhzParams gp{std::numbers::pi / 2, n};
      const ProtocolParams pp{x.s, x.p, x.r, 1};
      const double closed = fidelity_closed(kind, n, x.s, x.p, x.r);
      const double dense = kind == FidelityKind::tel ? average_teleportation_fidelity_dense(gp, pp).f_avg
                                                     : average_splitting_fidelity_dense(gp, pp).f_avg;
      return detail::Deviation{std::abs(closed - dense), detail::describe(n, x)};
    }));
  return out;
}

/// Completeness of Alice's Bell measurement: branch probabilities sum to one.
inline std::vector<OracleCheck> check_bell_completeness(const OracleGrid& g, double tol = 1e-10) {
  const auto pts = detail::flatten(g);
  std::vector<OracleCheck> out;
  for (int n : g.n)
    out.push_back(detail::run_check("bell_completeness", n, tol, pts, [n](const detail::GridPoint& x) {
      const GhzParams gp{x.theta, n};
      const DenseState resource = detail::protected_resource(gp, ProtocolParams{x.s, x.p, x.r, 1});
      detail::Deviation d;
      for (const auto& psi : haar_design_states()) {
        double total = 0.0;
        for (const auto& b : detail::bell_branches(resource, psi)) total += b.probability;
        detail::keep_worst(d, std::abs(total - 1.0), detail::describe(n, x));
      }
      return d;
    }));
  return out;
}

/// Every cross-engine check in one list. `quick` shrinks the grids.
inline std::vector<OracleCheck> run_oracle_suite(bool quick = false) {
  const OracleGrid mg = measure_oracle_grid(quick);
  const OracleGrid fg = fidelity_oracle_grid(quick);
  std::vector<OracleCheck> all;
  auto append = [&](std::vector<OracleCheck> v) { all.insert(all.end(), v.begin(), v.end()); };
  append(check_ln_oracle(mg));
  append(check_mw_oracle(mg));
  OracleGrid cg = mg;
  cg.n.insert(cg.n.begin(), 2);
  append(check_compact_oracle(cg));
  append(check_transmissivity_oracle(cg));
  append(check_fidelity_oracle(FidelityKind::tel, fg));
  append(check_fidelity_oracle(FidelityKind::is, fg));
  append(check_bell_completeness(fg));
  return all;
}

} // namespace wmr
