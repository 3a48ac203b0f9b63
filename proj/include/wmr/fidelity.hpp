#pragma once

// Average fidelities of one-sender / many-receiver teleportation and of
// multiparty quantum information splitting over a protected damped GHZ resource.
//
// Qubit layout of the dense simulations: qubit 0 carries the unknown state,
// qubit 1 is Alice's share of the resource and qubits 2..n are the receivers
// B_1..B_{n-1}. In the splitting protocol B_{n-1} is the designated receiver and
// B_1..B_{n-2} measure in the sigma_x eigenbasis.

#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "wmr/dense.hpp"
#include "wmr/errors.hpp"
#include "wmr/params.hpp"

namespace wmr {

struct UnknownQubit {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  void validate() const {
    detail::require(std::abs(std::norm(a) + std::norm(b) - 1.0) <= 1e-12, "UnknownQubit: amplitudes must be normalized");
  }
};

enum class BellLabel { phi_plus, phi_minus, psi_plus, psi_minus };

inline std::string to_string(BellLabel l) {
  switch (l) {
  case BellLabel::phi_plus: return "phi+";
  case BellLabel::phi_minus: return "phi-";
  case BellLabel::psi_plus: return "psi+";
  case BellLabel::psi_minus: return "psi-";
  }
  return "?";
}

inline constexpr std::array<BellLabel, 4> kBellLabels{BellLabel::phi_plus, BellLabel::phi_minus, BellLabel::psi_plus,
                                                      BellLabel::psi_minus};

struct BranchOutcome {
  BellLabel label = BellLabel::phi_plus;
  double probability = 0.0;
  DenseState bobs_state; ///< normalized unless the branch has vanishing probability
};

enum class FidelityKind { tel, is };

inline std::string to_string(FidelityKind k) { return k == FidelityKind::tel ? "tel" : "is"; }

struct FidelityReport {
  FidelityKind kind = FidelityKind::tel;
  double f_avg = 0.0;
  double r_used = 0.0;
  double s_used = 0.0;
  double p_used = 0.0;
  int n = 0;
  bool above_classical = false;
};

// ---------------------------------------------------------------------------
// Closed forms (symmetric GHZ resource)

namespace detail {

inline void check_fidelity_args(int n, double s, double p, double r) {
  require(n >= 3, "fidelity: need n >= 3 qubits, got " + std::to_string(n));
  ProtocolParams{s, p, r, 1}.validate_strengths();
}

inline double symmetric_transmissivity(int n, double s, double p, double r) {
  return 0.5 * (std::pow(1.0 - r, n) + std::pow(1.0 - s, n) * std::pow(1.0 - p * r, n));
}

} // namespace detail

inline double fidelity_tel_closed(int n, double s, double p, double r) {
  detail::check_fidelity_args(n, s, p, r);
  const double sb = 1.0 - s, pb = 1.0 - p, rb = 1.0 - r;
  const double sn = std::pow(sb, n), rn = std::pow(rb, n), pn = std::pow(p, n), pbn = std::pow(pb, n);
  const double pr = p * rb;
  const double t = detail::symmetric_transmissivity(n, s, p, r);
  const double bracket = 2.0 * rn * (1.0 + pn * sn) + 2.0 * pbn * sn + sn * (pr * std::pow(pb, n - 1) + pb * std::pow(pr, n - 1)) +
                         2.0 * std::pow(rb * pb * sb, 0.5 * n);
  return bracket / (6.0 * t);
}

inline double fidelity_is_closed(int n, double s, double p, double r) {
  detail::check_fidelity_args(n, s, p, r);
  const double sb = 1.0 - s, pb = 1.0 - p, rb = 1.0 - r;
  const double t = detail::symmetric_transmissivity(n, s, p, r);
  const double bracket = std::pow(rb, n) + std::pow(sb, n) * std::pow(pb + p * rb, n - 2) * (pb * pb + p * p * rb * rb + p * pb * rb) +
                         std::pow(rb * pb * sb, 0.5 * n);
  return bracket / (3.0 * t);
}

/// Teleportation fidelity without weak measurement or reversal.
inline double fidelity_tel_unprotected(int n, double p) {
  const double pb = 1.0 - p;
  return (2.0 + std::pow(p, n - 1) * (1.0 + p) + std::pow(pb, n - 1) * (1.0 + pb) + 2.0 * std::pow(pb, 0.5 * n)) / 6.0;
}

/// Information-splitting fidelity without weak measurement or reversal.
inline double fidelity_is_unprotected(int n, double p) {
  const double pb = 1.0 - p;
  return (2.0 - p * pb + std::pow(pb, 0.5 * n)) / 3.0;
}

inline double fidelity_closed(FidelityKind kind, int n, double s, double p, double r) {
  return kind == FidelityKind::tel ? fidelity_tel_closed(n, s, p, r) : fidelity_is_closed(n, s, p, r);
}

// ---------------------------------------------------------------------------
// Dense protocol simulation

/// Pauli correction applied by the receivers: X on every receiver qubit
/// (teleportation) or on the designated receiver (splitting), then Z on the
/// first receiver qubit.
struct Correction {
  bool flip = false;
  bool phase = false;
};

inline constexpr std::array<Correction, 4> kCorrectionCandidates{Correction{false, false}, Correction{false, true},
                                                                 Correction{true, false}, Correction{true, true}};

/// The corrections that undo each Bell outcome exactly for a pure GHZ resource.
inline std::array<Correction, 4> canonical_corrections() {
  return {Correction{false, false}, Correction{false, true}, Correction{true, false}, Correction{true, true}};
}

/// Six octahedron states: an exact spherical 3-design, so averaging any
/// quantity of degree <= 2 in the Bloch vector over them equals the Haar average.
inline std::array<UnknownQubit, 6> haar_design_states() {
  const double h = 1.0 / std::sqrt(2.0);
  return {UnknownQubit{1.0, 0.0},
          UnknownQubit{0.0, 1.0},
          UnknownQubit{h, h},
          UnknownQubit{h, -h},
          UnknownQubit{h, cplx(0.0, h)},
          UnknownQubit{h, cplx(0.0, -h)}};
}

inline CMatrix bell_projector(BellLabel label) {
  const double h = 1.0 / std::sqrt(2.0);
  std::array<cplx, 4> v{};
  switch (label) {
  case BellLabel::phi_plus: v = {h, 0.0, 0.0, h}; break;
  case BellLabel::phi_minus: v = {h, 0.0, 0.0, -h}; break;
  case BellLabel::psi_plus: v = {0.0, h, h, 0.0}; break;
  case BellLabel::psi_minus: v = {0.0, h, -h, 0.0}; break;
  }
  CMatrix pr(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) pr(i, j) = v[i] * std::conj(v[j]);
  return pr;
}

namespace detail {

inline const CMatrix& pauli_x() {
  static const CMatrix x = CMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  return x;
}
inline const CMatrix& pauli_z() {
  static const CMatrix z = CMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  return z;
}

inline CMatrix apply_correction(const CMatrix& rho, int n, const Correction& c, int first_flip, int phase_qubit) {
  CMatrix out = rho;
  if (c.flip)
    for (int q = first_flip; q < n; ++q) {
      const CMatrix* k[] = {&pauli_x()};
      conjugate_by_local(out, n, q, k);
    }
  if (c.phase) {
    const CMatrix* k[] = {&pauli_z()};
    conjugate_by_local(out, n, phase_qubit, k);
  }
  return out;
}

// <v| rho |v> for the vector a|0...0> + b|1...1> (or a single qubit when n == 1)
inline double ghz_like_overlap(const CMatrix& rho, const UnknownQubit& psi) {
  const std::size_t last = rho.rows() - 1;
  const cplx v = std::conj(psi.a) * rho(0, 0) * psi.a + std::conj(psi.a) * rho(0, last) * psi.b +
                 std::conj(psi.b) * rho(last, 0) * psi.a + std::conj(psi.b) * rho(last, last) * psi.b;
  return v.real();
}

inline DenseState protected_resource(const GhzParams& gp, const ProtocolParams& pp) {
  return normalize(apply_protocol_dense(make_gghz(gp), pp.s, pp.p, pp.r));
}

inline void check_protocol_size(const GhzParams& gp, int min_n) {
  gp.validate();
  require(gp.n >= min_n, "protocol simulation: need n >= " + std::to_string(min_n));
  require(gp.n + 1 <= 8, "protocol simulation: joint state limited to 8 qubits (n <= 7), got n = " + std::to_string(gp.n));
}

// Unnormalized receiver states sigma_j (trace = branch probability) for each Bell outcome.
inline std::array<BranchOutcome, 4> bell_branches(const DenseState& resource, const UnknownQubit& psi0) {
  psi0.validate();
  const std::array<cplx, 2> amp{psi0.a, psi0.b};
  const DenseState joint = tensor(pure_state(1, amp), resource);
  std::vector<int> bobs(static_cast<std::size_t>(resource.n - 1));
  std::iota(bobs.begin(), bobs.end(), 2);
  const std::array<int, 2> alice{0, 1};

  std::array<BranchOutcome, 4> out;
  for (std::size_t j = 0; j < 4; ++j) {
    const auto proj = project_and_renormalize(joint, bell_projector(kBellLabels[j]), alice);
    out[j].label = kBellLabels[j];
    out[j].probability = proj.probability;
    out[j].bobs_state = partial_trace(proj.state, bobs);
  }
  return out;
}

// Unnormalized branch matrix: probability * normalized state (or the raw matrix of a zero branch).
inline CMatrix weighted(const BranchOutcome& b) {
  return b.bobs_state.normalized ? b.bobs_state.matrix * cplx(b.probability) : b.bobs_state.matrix;
}

} // namespace detail

struct TeleportationRun {
  std::array<BranchOutcome, 4> branches;
  double fidelity = 0.0; ///< sum_j p_j <psi_f| U_j rho_j U_j^dagger |psi_f>
};

/// Runs the teleportation protocol for one input state with a fixed correction table.
inline TeleportationRun simulate_teleportation_dense(const GhzParams& gp, const ProtocolParams& pp, const UnknownQubit& psi0,
                                                     const std::array<Correction, 4>& corrections = canonical_corrections()) {
  detail::check_protocol_size(gp, 2);
  pp.validate_strengths();
  TeleportationRun run;
  run.branches = detail::bell_branches(detail::protected_resource(gp, pp), psi0);
  for (std::size_t j = 0; j < 4; ++j) {
    const CMatrix sigma = detail::apply_correction(detail::weighted(run.branches[j]), gp.n - 1, corrections[j], 0, 0);
    run.fidelity += detail::ghz_like_overlap(sigma, psi0);
  }
  return run;
}

struct AverageFidelity {
  double f_avg = 0.0;
  std::array<double, 4> branch_probability{}; ///< Haar-averaged probability of each Bell outcome
  std::vector<Correction> corrections;         ///< chosen per outcome (per joint outcome for splitting)
};

/// Haar-averaged teleportation fidelity. For each Bell outcome the receivers
/// use the fixed Pauli correction that maximizes the averaged fidelity.
inline AverageFidelity average_teleportation_fidelity_dense(const GhzParams& gp, const ProtocolParams& pp) {
  detail::check_protocol_size(gp, 2);
  pp.validate_strengths();
  const DenseState resource = detail::protected_resource(gp, pp);
  const auto design = haar_design_states();
  const double w = 1.0 / static_cast<double>(design.size());

  std::array<std::array<double, 4>, 4> score{}; // [outcome][candidate]
  AverageFidelity res;
  for (const auto& psi : design) {
    const auto branches = detail::bell_branches(resource, psi);
    for (std::size_t j = 0; j < 4; ++j) {
      res.branch_probability[j] += w * branches[j].probability;
      const CMatrix sigma = detail::weighted(branches[j]);
      for (std::size_t c = 0; c < 4; ++c)
        score[j][c] += w * detail::ghz_like_overlap(detail::apply_correction(sigma, gp.n - 1, kCorrectionCandidates[c], 0, 0), psi);
    }
  }
  for (std::size_t j = 0; j < 4; ++j) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 4; ++c)
      if (score[j][c] > score[j][best]) best = c;
    res.corrections.push_back(kCorrectionCandidates[best]);
    res.f_avg += score[j][best];
  }
  return res;
}

namespace detail {

// Receiver states after the assistants B_1..B_{n-2} measure sigma_x with outcome
// bits k (bit set = |->), weighted by the outcome probability.
inline std::vector<CMatrix> splitting_receiver_states(const CMatrix& bobs, int bob_count) {
  const int assistants = bob_count - 1;
  const std::size_t outcomes = std::size_t{1} << assistants;
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<int> helper(static_cast<std::size_t>(assistants));
  std::iota(helper.begin(), helper.end(), 0);
  const std::array<int, 1> receiver{bob_count - 1};

  std::vector<CMatrix> out;
  out.reserve(outcomes);
  const DenseState st{bob_count, bobs, false};
  for (std::size_t k = 0; k < outcomes; ++k) {
    // projector onto the product of |+> / |-> states selected by k
    std::vector<cplx> v{1.0};
    for (int t = 0; t < assistants; ++t) {
      const bool minus = (k >> (assistants - 1 - t)) & 1;
      std::vector<cplx> nv;
      nv.reserve(v.size() * 2);
      for (const auto& x : v) {
        nv.push_back(x * h);
        nv.push_back(x * (minus ? -h : h));
      }
      v = std::move(nv);
    }
    CMatrix proj(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) proj(i, j) = v[i] * std::conj(v[j]);
    const DenseState projected{bob_count, conjugate_by_operator(st.matrix, bob_count, proj, helper), false};
    out.push_back(partial_trace(projected, receiver).matrix);
  }
  return out;
}

} // namespace detail

/// Haar-averaged fidelity of quantum information splitting. After Alice's Bell
/// measurement the assistants measure sigma_x and the designated receiver applies
/// the Pauli correction that maximizes the averaged fidelity for that joint outcome.
inline AverageFidelity average_splitting_fidelity_dense(const GhzParams& gp, const ProtocolParams& pp) {
  detail::check_protocol_size(gp, 3);
  pp.validate_strengths();
  const DenseState resource = detail::protected_resource(gp, pp);
  const auto design = haar_design_states();
  const double w = 1.0 / static_cast<double>(design.size());
  const int bob_count = gp.n - 1;
  const std::size_t outcomes = std::size_t{1} << (bob_count - 1);

  std::vector<std::array<double, 4>> score(4 * outcomes, std::array<double, 4>{});
  AverageFidelity res;
  for (const auto& psi : design) {
    const auto branches = detail::bell_branches(resource, psi);
    for (std::size_t j = 0; j < 4; ++j) {
      res.branch_probability[j] += w * branches[j].probability;
      const auto rec = detail::splitting_receiver_states(detail::weighted(branches[j]), bob_count);
      for (std::size_t k = 0; k < outcomes; ++k)
        for (std::size_t c = 0; c < 4; ++c)
          score[j * outcomes + k][c] += w * detail::ghz_like_overlap(detail::apply_correction(rec[k], 1, kCorrectionCandidates[c], 0, 0), psi);
    }
  }
  for (const auto& sc : score) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 4; ++c)
      if (sc[c] > sc[best]) best = c;
    res.corrections.push_back(kCorrectionCandidates[best]);
    res.f_avg += sc[best];
  }
  return res;
}

/// Splitting fidelity for a single input state: probabilities q_k and receiver
/// corrections are those that the Haar-optimal table assigns.
inline double splitting_fidelity_for_input(const GhzParams& gp, const ProtocolParams& pp, const UnknownQubit& psi0) {
  const auto table = average_splitting_fidelity_dense(gp, pp).corrections;
  const DenseState resource = detail::protected_resource(gp, pp);
  const auto branches = detail::bell_branches(resource, psi0);
  const int bob_count = gp.n - 1;
  const std::size_t outcomes = std::size_t{1} << (bob_count - 1);
  double f = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    const auto rec = detail::splitting_receiver_states(detail::weighted(branches[j]), bob_count);
    for (std::size_t k = 0; k < outcomes; ++k)
      f += detail::ghz_like_overlap(detail::apply_correction(rec[k], 1, table[j * outcomes + k], 0, 0), psi0);
  }
  return f;
}

inline FidelityReport make_fidelity_report(FidelityKind kind, int n, double s, double p, double r, double f) {
  return {kind, f, r, s, p, n, f >= kClassicalFidelity};
}

} // namespace wmr
