#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "wmr/dense.hpp"

namespace wmr {
namespace {

constexpr double kPi = std::numbers::pi;

DenseState bell_phi_plus() { return make_gghz(GhzParams{kPi / 2, 2}); }

TEST(MakeGghz, BellStateCorners) {
  const DenseState st = bell_phi_plus();
  EXPECT_EQ(st.dim(), 4u);
  for (auto [i, j] : {std::pair{0, 0}, {0, 3}, {3, 0}, {3, 3}}) EXPECT_NEAR(st.matrix(i, j).real(), 0.5, 1e-15);
  EXPECT_EQ(st.matrix(1, 1), cplx(0.0));
  EXPECT_TRUE(is_valid_state(st));
}

TEST(MakeGghz, ThetaZeroIsAllZeros) {
  const DenseState st = make_gghz(GhzParams{0.0, 3});
  EXPECT_DOUBLE_EQ(st.matrix(0, 0).real(), 1.0);
  EXPECT_NEAR(st.trace(), 1.0, 0.0);
  EXPECT_EQ(st.matrix(7, 7), cplx(0.0));
}

TEST(MakeGghz, ThetaPiOverThree) {
  const DenseState st = make_gghz(GhzParams{kPi / 3, 4});
  EXPECT_NEAR(st.matrix(0, 0).real(), 0.75, 1e-15);
  EXPECT_NEAR(st.matrix(15, 15).real(), 0.25, 1e-15);
  EXPECT_NEAR(st.matrix(0, 15).real(), std::sqrt(3.0) / 4, 1e-15);
}

TEST(MakeGghz, RejectsBadArguments) {
  EXPECT_THROW(make_gghz(GhzParams{-0.1, 3}), DomainError);
  EXPECT_THROW(make_gghz(GhzParams{kPi + 0.1, 3}), DomainError);
  EXPECT_THROW(make_gghz(GhzParams{kPi / 2, 11}), DomainError);
}

TEST(Kraus, DampingIsTracePreserving) {
  for (double p : {0.0, 0.3, 1.0}) {
    const auto k = damping_kraus(p);
    const CMatrix sum = k.op0.adjoint() * k.op0 + k.op1.adjoint() * k.op1;
    EXPECT_LE(max_abs_diff(sum, CMatrix::identity(2)), 1e-12);
  }
}

TEST(Kraus, WeakAndReversalAreCompletePovms) {
  for (double x : {0.0, 0.4, 0.9}) {
    for (const auto& k : {weak_kraus(x), reversal_kraus(x)}) {
      const CMatrix sum = k.op0.adjoint() * k.op0 + k.op1.adjoint() * k.op1;
      EXPECT_LE(max_abs_diff(sum, CMatrix::identity(2)), 1e-12);
      const CMatrix& kept = kept_branch(k.label) == KrausSelector::op0 ? k.op0 : k.op1;
      const auto eig = herm_eigenvalues(CMatrix::identity(2) - kept.adjoint() * kept);
      EXPECT_GE(eig.eigenvalues.back(), -1e-15);
    }
  }
}

TEST(SingleQubitMap, FullDampingSendsOneToZero) {
  const std::array<int, 1> one{1};
  const DenseState out = apply_single_qubit_map(product_state(one), 0, damping_kraus(1.0));
  EXPECT_DOUBLE_EQ(out.matrix(0, 0).real(), 1.0);
  EXPECT_DOUBLE_EQ(out.matrix(1, 1).real(), 0.0);
}

TEST(SingleQubitMap, WeakNullResultScalesExcitedPopulation) {
  const std::array<int, 1> one{1};
  const DenseState out = apply_single_qubit_map(product_state(one), 0, weak_kraus(0.3), KrausSelector::op1);
  EXPECT_NEAR(out.matrix(1, 1).real(), 0.7, 1e-15);
  EXPECT_FALSE(out.normalized);
}

TEST(SingleQubitMap, RejectsBadQubit) {
  EXPECT_THROW(apply_single_qubit_map(bell_phi_plus(), 2, damping_kraus(0.1)), DomainError);
  EXPECT_THROW(apply_single_qubit_map(bell_phi_plus(), -1, damping_kraus(0.1)), DomainError);
}

TEST(SingleQubitMap, DampedBellState) {
  // p = 0.5 on both qubits: |11> keeps 1/4 of its weight, leaks 1/4 to each of
  // |01>, |10> and |00>; the coherence scales by pbar = 0.5
  const DenseState out = apply_channel_all_qubits(bell_phi_plus(), damping_kraus(0.5));
  EXPECT_NEAR(out.matrix(0, 3).real(), 0.25, 1e-15);
  EXPECT_NEAR(out.matrix(0, 0).real(), 0.625, 1e-15);
  EXPECT_NEAR(out.matrix(1, 1).real(), 0.125, 1e-15);
  EXPECT_NEAR(out.matrix(2, 2).real(), 0.125, 1e-15);
  EXPECT_NEAR(out.matrix(3, 3).real(), 0.125, 1e-15);
  EXPECT_NEAR(out.trace(), 1.0, 1e-15);
}

TEST(ChannelAllQubits, ZeroStrengthWeakIsIdentity) {
  const DenseState st = make_gghz(GhzParams{1.1, 3});
  const DenseState out = apply_channel_all_qubits(st, weak_kraus(0.0), KrausSelector::op1);
  EXPECT_LE(max_abs_diff(out.matrix, st.matrix), 0.0);
}

TEST(ChannelAllQubits, FullDampingGivesGroundState) {
  const DenseState out = apply_channel_all_qubits(make_gghz(GhzParams{kPi / 2, 4}), damping_kraus(1.0));
  EXPECT_NEAR(out.matrix(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(out.trace(), 1.0, 1e-15);
  double off = 0.0;
  for (std::size_t i = 0; i < out.dim(); ++i)
    for (std::size_t j = 0; j < out.dim(); ++j)
      if (i || j) off = std::max(off, std::abs(out.matrix(i, j)));
  EXPECT_EQ(off, 0.0);
}

// Local maps on different qubits commute: any qubit order gives the same matrix.
TEST(ChannelAllQubits, QubitOrderIndependence) {
  const DenseState st = make_gghz(GhzParams{0.9, 4});
  const auto weak = weak_kraus(0.35), damp = damping_kraus(0.45), rev = reversal_kraus(0.6);
  const DenseState forward = apply_protocol_dense(st, 0.35, 0.45, 0.6);
  std::array<int, 4> order{3, 1, 0, 2};
  DenseState alt = st;
  for (int q : order) alt = apply_single_qubit_map(alt, q, weak, KrausSelector::op1);
  std::reverse(order.begin(), order.end());
  for (int q : order) alt = apply_single_qubit_map(alt, q, damp);
  for (int q : {2, 0, 3, 1}) alt = apply_single_qubit_map(alt, q, rev, KrausSelector::op0);
  EXPECT_LE(max_abs_diff(forward.matrix, alt.matrix), 1e-12);
}

TEST(PartialTranspose, BellSpectrum) {
  const auto eig = herm_eigenvalues(partial_transpose(bell_phi_plus(), 0b1).matrix);
  EXPECT_NEAR(eig.eigenvalues[0], 0.5, 1e-14);
  EXPECT_NEAR(eig.eigenvalues[1], 0.5, 1e-14);
  EXPECT_NEAR(eig.eigenvalues[2], 0.5, 1e-14);
  EXPECT_NEAR(eig.eigenvalues[3], -0.5, 1e-14);
}

TEST(PartialTranspose, ProductStateStaysPositive) {
  const std::array<int, 3> bits{1, 0, 1};
  const auto eig = herm_eigenvalues(partial_transpose(product_state(bits), 0b010).matrix);
  EXPECT_GE(eig.eigenvalues.back(), 0.0);
  EXPECT_DOUBLE_EQ(eig.eigenvalues.front(), 1.0);
}

TEST(PartialTranspose, RejectsTrivialMasks) {
  const DenseState st = make_gghz(GhzParams{kPi / 2, 3});
  EXPECT_THROW(partial_transpose(st, 0), DomainError);
  EXPECT_THROW(partial_transpose(st, 0b111), DomainError);
  EXPECT_THROW(partial_transpose(st, 0b1000), DomainError);
}

TEST(PartialTranspose, DampedGhzMinimumEigenvalue) {
  const DenseState rho = apply_channel_all_qubits(make_gghz(GhzParams{kPi / 2, 4}), damping_kraus(0.5));
  const auto eig = herm_eigenvalues(partial_transpose(rho, leading_mask(2)).matrix);
  EXPECT_NEAR(eig.eigenvalues.back(), -0.09375, 1e-12);
  EXPECT_NEAR(negativity_dense(rho, leading_mask(2)), 0.09375, 1e-12);
}

DenseState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const std::size_t dim = std::size_t{1} << n;
  CMatrix a(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  rho *= 1.0 / rho.trace().real();
  return DenseState{n, rho, true};
}

TEST(PartialTranspose, InvolutionAndComplementSymmetry) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseState st = random_state(3, rng);
    for (std::uint32_t mask : {0b001u, 0b010u, 0b011u, 0b101u}) {
      const DenseState twice = partial_transpose(partial_transpose(st, mask), mask);
      EXPECT_LE(max_abs_diff(twice.matrix, st.matrix), 0.0);
      EXPECT_NEAR(negativity_dense(st, mask), negativity_dense(st, 0b111u & ~mask), 1e-12);
      EXPECT_NEAR(partial_transpose(st, mask).trace(), st.trace(), 1e-14);
    }
  }
}

TEST(Negativity, BellAndProduct) {
  EXPECT_NEAR(negativity_dense(bell_phi_plus(), 0b01), 0.5, 1e-14);
  EXPECT_NEAR(negativity_dense(bell_phi_plus(), 0b10), 0.5, 1e-14);
  const std::array<int, 2> bits{0, 1};
  EXPECT_EQ(negativity_dense(product_state(bits), 0b01), 0.0);
}

// For gGHZ inputs only the size of the cut matters.
TEST(Negativity, DependsOnlyOnCutSize) {
  const DenseState rho = apply_protocol_dense(make_gghz(GhzParams{1.2, 5}), 0.2, 0.3, 0.4);
  const double ref1 = negativity_dense(rho, 0b00001);
  const double ref2 = negativity_dense(rho, 0b00011);
  for (std::uint32_t mask : {0b00100u, 0b10000u}) EXPECT_NEAR(negativity_dense(rho, mask), ref1, 1e-12);
  for (std::uint32_t mask : {0b10100u, 0b01001u, 0b11000u}) EXPECT_NEAR(negativity_dense(rho, mask), ref2, 1e-12);
}

CMatrix projector_of(const std::array<cplx, 4>& v) {
  CMatrix p(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) p(i, j) = v[i] * std::conj(v[j]);
  return p;
}

TEST(Projection, BellOutcomes) {
  const double h = 1.0 / std::sqrt(2.0);
  const std::array<int, 2> qubits{0, 1};
  const auto same = project_and_renormalize(bell_phi_plus(), projector_of({h, 0.0, 0.0, h}), qubits);
  EXPECT_NEAR(same.probability, 1.0, 1e-15);
  EXPECT_FALSE(same.zero_branch);
  EXPECT_LE(max_abs_diff(same.state.matrix, bell_phi_plus().matrix), 1e-15);

  const auto other = project_and_renormalize(bell_phi_plus(), projector_of({0.0, h, h, 0.0}), qubits);
  EXPECT_NEAR(other.probability, 0.0, 1e-15);
  EXPECT_TRUE(other.zero_branch);
  EXPECT_FALSE(other.state.normalized);
}

TEST(Projection, RejectsNonProjector) {
  const std::array<int, 1> q{0};
  const auto not_projector = CMatrix::from_rows({{0.5, 0.0}, {0.0, 0.0}});
  EXPECT_THROW(project_and_renormalize(bell_phi_plus(), not_projector, q), DomainError);
}

TEST(PartialTrace, BellReducesToMixed) {
  const std::array<int, 1> keep{1};
  const DenseState red = partial_trace(bell_phi_plus(), keep);
  EXPECT_LE(max_abs_diff(red.matrix, CMatrix::identity(2) * cplx(0.5)), 1e-15);
}

TEST(DenseState, SizeCap) {
  EXPECT_THROW(check_dense_size(11), DomainError);
  EXPECT_THROW(check_dense_size(0), DomainError);
  EXPECT_NO_THROW(check_dense_size(10));
}

} // namespace
} // namespace wmr
