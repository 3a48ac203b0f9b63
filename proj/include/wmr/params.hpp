#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "wmr/errors.hpp"

namespace wmr {

/// Entanglement counts as dead once the optimized measure is at or below this value.
inline constexpr double kDeathThreshold = 1e-3;

/// Best average fidelity reachable with classical communication alone.
inline constexpr double kClassicalFidelity = 2.0 / 3.0;

/// Generalized GHZ state cos(theta/2)|0...0> + sin(theta/2)|1...1> on n qubits.
struct GhzParams {
  double theta = std::numbers::pi / 2;
  int n = 4;

  double alpha() const noexcept { return std::cos(theta / 2); }
  double beta() const noexcept { return std::sin(theta / 2); }

  void validate() const {
    detail::require(theta >= 0.0 && theta <= std::numbers::pi, "GhzParams: theta must lie in [0, pi], got " + std::to_string(theta));
    detail::require(n >= 2, "GhzParams: need n >= 2, got " + std::to_string(n));
  }
};

/// Strengths of the weak measurement (s), damping (p) and reversal (r), plus the
/// size m of the transposed block of an m | (n - m) bipartition.
struct ProtocolParams {
  double s = 0.0;
  double p = 0.0;
  double r = 0.0;
  int m = 1;

  double s_bar() const noexcept { return 1.0 - s; }
  double p_bar() const noexcept { return 1.0 - p; }
  double r_bar() const noexcept { return 1.0 - r; }

  /// Range checks only; the bipartition is checked against n separately.
  void validate_strengths() const {
    detail::require(s >= 0.0 && s < 1.0, "ProtocolParams: s must lie in [0, 1), got " + std::to_string(s));
    detail::require(p >= 0.0 && p <= 1.0, "ProtocolParams: p must lie in [0, 1], got " + std::to_string(p));
    detail::require(r >= 0.0 && r < 1.0, "ProtocolParams: r must lie in [0, 1), got " + std::to_string(r));
  }

  void validate(int n) const {
    validate_strengths();
    detail::require(m >= 1 && m <= n - 1, "ProtocolParams: bipartition m must lie in [1, n-1], got " + std::to_string(m));
  }
};

/// Overall success probability of weak measurement followed by reversal on a
/// damped gGHZ state: alpha^2 rbar^n + beta^2 sbar^n (1 - p r)^n.
inline double transmissivity(const GhzParams& gp, double s, double p, double r) {
  const double a2 = gp.alpha() * gp.alpha();
  const double b2 = gp.beta() * gp.beta();
  const int n = gp.n;
  return a2 * std::pow(1.0 - r, n) + b2 * std::pow(1.0 - s, n) * std::pow(1.0 - p * r, n);
}

/// Success probability of the initial weak measurement alone.
inline double weak_success_probability(const GhzParams& gp, double s) {
  const double a2 = gp.alpha() * gp.alpha();
  const double b2 = gp.beta() * gp.beta();
  return a2 + std::pow(1.0 - s, gp.n) * b2;
}

} // namespace wmr
