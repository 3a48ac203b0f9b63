#pragma once

// Exact density-matrix engine for up to ten qubits.
//
// Basis convention: qubit 0 is the most significant bit of a computational
// basis index, so |q0 q1 ... q_{n-1}> has index sum_q bit_q << (n - 1 - q).
// Partition masks use the same qubit numbering: bit q of the mask selects
// qubit q.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wmr/errors.hpp"
#include "wmr/linalg.hpp"
#include "wmr/params.hpp"

namespace wmr {

inline constexpr int kMaxDenseQubits = 10;

struct DenseState {
  int n = 0;
  CMatrix matrix;
  bool normalized = true;

  std::size_t dim() const noexcept { return std::size_t{1} << n; }
  double trace() const { return matrix.trace().real(); }
};

enum class ChannelKind { damping, weak, reversal };

inline std::string to_string(ChannelKind k) {
  switch (k) {
  case ChannelKind::damping: return "damping";
  case ChannelKind::weak: return "weak";
  case ChannelKind::reversal: return "reversal";
  }
  return "unknown";
}

struct KrausPair {
  CMatrix op0;
  CMatrix op1;
  ChannelKind label = ChannelKind::damping;
};

enum class KrausSelector { op0, op1 };

/// Local amplitude damping: |1> decays to |0> with probability p.
inline KrausPair damping_kraus(double p) {
  detail::require(p >= 0.0 && p <= 1.0, "damping_kraus: p must lie in [0, 1]");
  return {CMatrix::from_rows({{1.0, 0.0}, {0.0, std::sqrt(1.0 - p)}}),
          CMatrix::from_rows({{0.0, std::sqrt(p)}, {0.0, 0.0}}), ChannelKind::damping};
}

/// Weak measurement of strength s. op1 is the null-result operator that is kept.
inline KrausPair weak_kraus(double s) {
  detail::require(s >= 0.0 && s <= 1.0, "weak_kraus: s must lie in [0, 1]");
  return {CMatrix::from_rows({{0.0, 0.0}, {0.0, std::sqrt(s)}}),
          CMatrix::from_rows({{1.0, 0.0}, {0.0, std::sqrt(1.0 - s)}}), ChannelKind::weak};
}

/// Reversal measurement of strength r. op0 is the operator that is kept; op1
/// completes the POVM.
inline KrausPair reversal_kraus(double r) {
  detail::require(r >= 0.0 && r <= 1.0, "reversal_kraus: r must lie in [0, 1]");
  return {CMatrix::from_rows({{std::sqrt(1.0 - r), 0.0}, {0.0, 1.0}}),
          CMatrix::from_rows({{std::sqrt(r), 0.0}, {0.0, 0.0}}), ChannelKind::reversal};
}

/// The branch retained by post-selection for each measurement kind.
inline KrausSelector kept_branch(ChannelKind k) {
  return k == ChannelKind::weak ? KrausSelector::op1 : KrausSelector::op0;
}

inline void check_dense_size(int n) {
  detail::require(n >= 1 && n <= kMaxDenseQubits,
                  "dense engine supports 1 <= n <= " + std::to_string(kMaxDenseQubits) + " qubits, got " + std::to_string(n));
}

/// Hermiticity, positivity and (if flagged) unit trace, at the engine's tolerances.
inline bool is_valid_state(const DenseState& st) {
  if (hermiticity_defect(st.matrix) > 1e-12) return false;
  const auto eig = herm_eigenvalues(st.matrix);
  if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -1e-10) return false;
  if (st.normalized && std::abs(st.trace() - 1.0) > 1e-10) return false;
  return true;
}

inline DenseState make_gghz(const GhzParams& gp) {
  detail::require(gp.theta >= 0.0 && gp.theta <= std::numbers::pi, "make_gghz: theta must lie in [0, pi]");
  check_dense_size(gp.n);
  DenseState st{gp.n, CMatrix(std::size_t{1} << gp.n), true};
  const std::size_t last = st.dim() - 1;
  const double a = gp.alpha();
  const double b = gp.beta();
  st.matrix(0, 0) = a * a;
  st.matrix(0, last) = a * b;
  st.matrix(last, 0) = a * b;
  st.matrix(last, last) = b * b;
  return st;
}

inline DenseState product_state(std::span<const int> bits) {
  const int n = static_cast<int>(bits.size());
  check_dense_size(n);
  std::size_t idx = 0;
  for (int b : bits) idx = (idx << 1) | static_cast<std::size_t>(b != 0);
  DenseState st{n, CMatrix(std::size_t{1} << n), true};
  st.matrix(idx, idx) = 1.0;
  return st;
}

inline DenseState pure_state(int n, std::span<const cplx> amplitudes) {
  check_dense_size(n);
  detail::require(amplitudes.size() == (std::size_t{1} << n), "pure_state: amplitude count must be 2^n");
  DenseState st{n, CMatrix(amplitudes.size()), true};
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    for (std::size_t j = 0; j < amplitudes.size(); ++j) st.matrix(i, j) = amplitudes[i] * std::conj(amplitudes[j]);
  return st;
}

namespace detail {

inline std::size_t index_bit(int n, int qubit) { return std::size_t{1} << (n - 1 - qubit); }

// rho -> sum_k K_k rho K_k^dagger in place, for 2x2 operators K_k on one qubit.
inline void conjugate_by_local(CMatrix& rho, int n, int qubit, std::span<const CMatrix* const> ks) {
  const std::size_t dim = rho.rows();
  const std::size_t bit = index_bit(n, qubit);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const cplx b[2][2] = {{rho(i, j), rho(i, j | bit)}, {rho(i | bit, j), rho(i | bit, j | bit)}};
      cplx o[2][2] = {};
      for (const CMatrix* kp : ks) {
        const CMatrix& k = *kp;
        cplx kb[2][2] = {};
        for (int x = 0; x < 2; ++x)
          for (int c = 0; c < 2; ++c)
            if (k(x, c) != cplx(0.0)) {
              kb[x][0] += k(x, c) * b[c][0];
              kb[x][1] += k(x, c) * b[c][1];
            }
        for (int y = 0; y < 2; ++y)
          for (int c = 0; c < 2; ++c)
            if (k(y, c) != cplx(0.0)) {
              const cplx kc = std::conj(k(y, c));
              o[0][y] += kb[0][c] * kc;
              o[1][y] += kb[1][c] * kc;
            }
      }
      rho(i, j) = o[0][0];
      rho(i, j | bit) = o[0][1];
      rho(i | bit, j) = o[1][0];
      rho(i | bit, j | bit) = o[1][1];
    }
  }
}

// Embeds a 2^k x 2^k operator acting on `qubits` (in that order) and applies rho -> O rho O^dagger.
inline CMatrix conjugate_by_operator(const CMatrix& rho, int n, const CMatrix& op, std::span<const int> qubits) {
  const std::size_t dim = rho.rows();
  const std::size_t k = qubits.size();
  const std::size_t sub = std::size_t{1} << k;
  std::size_t mask = 0;
  for (int q : qubits) mask |= index_bit(n, q);

  auto sub_index = [&](std::size_t i) {
    std::size_t s = 0;
    for (int q : qubits) s = (s << 1) | ((i & index_bit(n, q)) ? 1 : 0);
    return s;
  };
  auto with_sub = [&](std::size_t i, std::size_t s) {
    std::size_t out = i & ~mask;
    for (std::size_t t = 0; t < k; ++t) {
      if ((s >> (k - 1 - t)) & 1) out |= index_bit(n, qubits[t]);
    }
    return out;
  };

  CMatrix left(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t si = sub_index(i);
    for (std::size_t a = 0; a < sub; ++a) {
      const cplx o = op(si, a);
      if (o == cplx(0.0)) continue;
      const std::size_t src = with_sub(i, a);
      for (std::size_t j = 0; j < dim; ++j) left(i, j) += o * rho(src, j);
    }
  }
  CMatrix out(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const std::size_t sj = sub_index(j);
    for (std::size_t b = 0; b < sub; ++b) {
      const cplx o = std::conj(op(sj, b));
      if (o == cplx(0.0)) continue;
      const std::size_t src = with_sub(j, b);
      for (std::size_t i = 0; i < dim; ++i) out(i, j) += left(i, src) * o;
    }
  }
  return out;
}

} // namespace detail

/// Applies one local map (or only one of its Kraus operators) to a single qubit.
/// With a selector the result is the unnormalized post-selected branch.
inline DenseState apply_single_qubit_map(DenseState st, int qubit, const KrausPair& kraus,
                                         std::optional<KrausSelector> keep_only = std::nullopt) {
  detail::require(qubit >= 0 && qubit < st.n, "apply_single_qubit_map: qubit index " + std::to_string(qubit) + " out of range");
  DenseState out = std::move(st);
  if (keep_only) {
    const CMatrix* k[] = {*keep_only == KrausSelector::op0 ? &kraus.op0 : &kraus.op1};
    detail::conjugate_by_local(out.matrix, out.n, qubit, k);
    out.normalized = false;
  } else {
    const CMatrix* k[] = {&kraus.op0, &kraus.op1};
    detail::conjugate_by_local(out.matrix, out.n, qubit, k);
  }
  return out;
}

inline DenseState apply_channel_all_qubits(const DenseState& st, const KrausPair& kraus,
                                           std::optional<KrausSelector> keep_only = std::nullopt) {
  DenseState out = st;
  for (int q = 0; q < st.n; ++q) out = apply_single_qubit_map(std::move(out), q, kraus, keep_only);
  return out;
}

/// Weak measurement, damping and reversal on every qubit, keeping only the
/// successful branches. The trace of the result is the transmissivity.
inline DenseState apply_protocol_dense(const DenseState& st, double s, double p, double r) {
  const auto weak = weak_kraus(s);
  const auto damp = damping_kraus(p);
  const auto rev = reversal_kraus(r);
  DenseState out = apply_channel_all_qubits(st, weak, kept_branch(ChannelKind::weak));
  out = apply_channel_all_qubits(out, damp);
  out = apply_channel_all_qubits(out, rev, kept_branch(ChannelKind::reversal));
  return out;
}

inline DenseState normalize(DenseState st) {
  const double tr = st.trace();
  if (!(tr > 0.0)) throw NumericalError("normalize: state has non-positive trace");
  st.matrix *= 1.0 / tr;
  st.normalized = true;
  return st;
}

inline DenseState partial_transpose(const DenseState& st, std::uint32_t partition_mask) {
  const std::uint32_t full = (st.n >= 32) ? ~0u : ((1u << st.n) - 1u);
  detail::require(partition_mask != 0 && (partition_mask & full) != full && (partition_mask & ~full) == 0,
                  "partial_transpose: mask must select a nonempty proper subset of qubits");
  std::size_t bits = 0;
  for (int q = 0; q < st.n; ++q)
    if (partition_mask & (1u << q)) bits |= detail::index_bit(st.n, q);
  const std::size_t dim = st.dim();
  DenseState out{st.n, CMatrix(dim), st.normalized};
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const std::size_t ti = (i & ~bits) | (j & bits);
      const std::size_t tj = (j & ~bits) | (i & bits);
      out.matrix(ti, tj) = st.matrix(i, j);
    }
  return out;
}

/// Mask selecting the first m qubits, the canonical m | (n - m) cut.
inline std::uint32_t leading_mask(int m) { return (m >= 32) ? ~0u : ((1u << m) - 1u); }

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose
/// of the trace-normalized state.
inline double negativity_dense(const DenseState& st, std::uint32_t partition_mask) {
  const DenseState pt = partial_transpose(st.normalized ? st : normalize(st), partition_mask);
  const auto eig = herm_eigenvalues(pt.matrix);
  double neg = 0.0;
  for (double ev : eig.eigenvalues)
    if (ev < 0.0) neg -= ev;
  return neg;
}

struct ProjectionResult {
  DenseState state;
  double probability = 0.0;
  bool zero_branch = false; ///< probability below 1e-14; state left unnormalized
};

/// Projects the selected qubits with P and renormalizes the surviving branch.
inline ProjectionResult project_and_renormalize(const DenseState& st, const CMatrix& projector, std::span<const int> qubits) {
  const std::size_t k = qubits.size();
  detail::require(k >= 1 && projector.square() && projector.rows() == (std::size_t{1} << k),
                  "project_and_renormalize: projector dimension must be 2^k for k acting qubits");
  for (int q : qubits) detail::require(q >= 0 && q < st.n, "project_and_renormalize: qubit index out of range");
  detail::require(hermiticity_defect(projector) <= 1e-10 && max_abs_diff(projector * projector, projector) <= 1e-10,
                  "project_and_renormalize: operator is not an orthogonal projector");

  ProjectionResult res;
  res.state = DenseState{st.n, detail::conjugate_by_operator(st.matrix, st.n, projector, qubits), false};
  res.probability = res.state.trace();
  if (res.probability > 1e-14) {
    res.state.matrix *= 1.0 / res.probability;
    res.state.normalized = true;
  } else {
    res.zero_branch = true;
  }
  return res;
}

/// Conjugates the selected qubits by an arbitrary operator (unitary corrections).
inline DenseState apply_operator(const DenseState& st, const CMatrix& op, std::span<const int> qubits) {
  detail::require(op.square() && op.rows() == (std::size_t{1} << qubits.size()), "apply_operator: operator dimension must be 2^k");
  return DenseState{st.n, detail::conjugate_by_operator(st.matrix, st.n, op, qubits), st.normalized};
}

/// Traces out every qubit not listed in `keep`; kept qubits retain their relative order.
inline DenseState partial_trace(const DenseState& st, std::span<const int> keep) {
  const int nk = static_cast<int>(keep.size());
  detail::require(nk >= 1 && nk <= st.n, "partial_trace: need 1..n kept qubits");
  std::size_t keep_bits = 0;
  for (int q : keep) {
    detail::require(q >= 0 && q < st.n, "partial_trace: qubit index out of range");
    keep_bits |= detail::index_bit(st.n, q);
  }
  const std::size_t dim = st.dim();
  const std::size_t kdim = std::size_t{1} << nk;
  auto reduced_index = [&](std::size_t i) {
    std::size_t s = 0;
    for (int q : keep) s = (s << 1) | ((i & detail::index_bit(st.n, q)) ? 1 : 0);
    return s;
  };
  DenseState out{nk, CMatrix(kdim), st.normalized};
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      if ((i & ~keep_bits) != (j & ~keep_bits)) continue;
      out.matrix(reduced_index(i), reduced_index(j)) += st.matrix(i, j);
    }
  return out;
}

inline DenseState tensor(const DenseState& a, const DenseState& b) {
  check_dense_size(a.n + b.n);
  return DenseState{a.n + b.n, kron(a.matrix, b.matrix), a.normalized && b.normalized};
}

} // namespace wmr
