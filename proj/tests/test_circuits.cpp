#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "qvar/circuits.hpp"
#include "qvar/states.hpp"

namespace qvar {
namespace {

RealVector random_angles(int count, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  RealVector t(count);
  for (auto& v : t) v = angle(rng);
  return t;
}

TEST(Unitary, EmptyCircuitIsIdentity) {
  const Circuit c(3);
  EXPECT_LT(max_abs(unitary(c, RealVector(0)) - identity(8)), 1e-15);
}

TEST(Unitary, RxQuarterTurn) {
  Circuit c(1);
  c.pauli_rotation(PauliString(1, {{0, Pauli::X}}), c.add_slots(1));
  RealVector t(1);
  t << std::numbers::pi / 4.0;  // e^{-iπ/4 X}|0> = (|0> - i|1>)/√2
  const Vector out = unitary(c, t) * basis_state(1, 0);
  EXPECT_NEAR(std::abs(out(0) - Complex(1.0 / std::sqrt(2.0))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out(1) - Complex(0.0, -1.0 / std::sqrt(2.0))), 0.0, 1e-14);
  t << std::numbers::pi / 2.0;  // e^{-iπ/2 X} = -iX
  const Matrix full = unitary(c, t);
  EXPECT_NEAR(std::abs(full(1, 0) - Complex(0.0, -1.0)), 0.0, 1e-14);
  EXPECT_THROW(unitary(c, RealVector(2)), std::invalid_argument);
}

TEST(Unitary, GateOrderFirstAppliedFirst) {
  Circuit c(1);
  c.pauli_rotation(PauliString(1, {{0, Pauli::X}}), c.add_slots(1));
  c.pauli_rotation(PauliString(1, {{0, Pauli::Z}}), c.add_slots(1));
  RealVector t(2);
  t << 0.3, 0.8;
  Circuit x(1);
  x.pauli_rotation(PauliString(1, {{0, Pauli::X}}), x.add_slots(1));
  Circuit z(1);
  z.pauli_rotation(PauliString(1, {{0, Pauli::Z}}), z.add_slots(1));
  const Matrix want = unitary(z, t.tail(1)) * unitary(x, t.head(1));
  EXPECT_LT(max_abs(unitary(c, t) - want), 1e-14);
}

TEST(Unitary, UnitaryOnRandomAngles) {
  Rng rng(1);
  const Circuit c = hea(4, 2);
  for (int t = 0; t < 50; ++t) {
    const Matrix u = unitary(c, random_angles(c.param_count(), rng));
    EXPECT_LT(max_abs(u.adjoint() * u - identity(16)), 1e-10);
  }
}

TEST(Unitary, ZeroAnglesGiveIdentity) {
  for (const Circuit& c : {hea(3, 2), hva_cluster(4, 2), qcnn(4, true, 2)}) {
    const Matrix u = unitary(c, RealVector::Zero(c.param_count()));
    // QCNN may permute survivors with fixed SWAPs; strip them by checking |U| is a permutation.
    const RealMatrix mag = u.cwiseAbs();
    EXPECT_LT((mag.rowwise().sum() - RealVector::Ones(u.rows())).norm(), 1e-12);
    EXPECT_LT((mag.colwise().sum().transpose() - RealVector::Ones(u.rows())).norm(), 1e-12);
  }
  EXPECT_LT(max_abs(unitary(hea(3, 2), RealVector::Zero(16)) - identity(8)), 1e-15);
  const Circuit h = hva_cluster(4, 2);
  EXPECT_LT(max_abs(unitary(h, RealVector::Zero(h.param_count())) - identity(16)), 1e-13);
}

TEST(Unitary, ApplyMatchesDenseAndAdjointInverts) {
  Rng rng(2);
  const Circuit c = qcnn(4, true, 1);
  const RealVector t = random_angles(c.param_count(), rng);
  const Matrix cols = random_gaussian_matrix(16, 3, rng);
  EXPECT_LT(max_abs(apply(c, t, cols) - unitary(c, t) * cols), 1e-12);
  EXPECT_LT(max_abs(apply_adjoint(c, t, apply(c, t, cols)) - cols), 1e-12);
}

TEST(Hea, LayoutAndCounts) {
  EXPECT_EQ(hea(5, 5).param_count(), 70);
  EXPECT_EQ(hea(3, 2).param_count(), 16);
  const Circuit c = hea(2, 1);
  ASSERT_EQ(c.gates().size(), 5u);
  const std::vector<std::string> names{"RX", "RX", "RZ", "RZ", "RZZ"};
  const std::vector<std::vector<int>> qubits{{0}, {1}, {0}, {1}, {0, 1}};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(c.gates()[i].name, names[i]);
    EXPECT_EQ(c.gates()[i].qubits, qubits[i]);
    EXPECT_EQ(c.gates()[i].slots, std::vector<int>{static_cast<int>(i)});
  }
  EXPECT_THROW(hea(1, 1), std::invalid_argument);
}

TEST(Hea, ClosingRotations) {
  const Circuit c = hea(3, 2, true);
  EXPECT_EQ(c.param_count(), 16 + 6);
  EXPECT_EQ(c.gates().back().name, "RZ");
  EXPECT_EQ(c.gates()[c.gates().size() - 4].name, "RX");
}

TEST(Qcnn, LevelsAndBaseCase) {
  EXPECT_EQ(qcnn_levels(8, 1), 3);
  EXPECT_EQ(qcnn_levels(8, 2), 2);
  EXPECT_EQ(qcnn_levels(2, 1), 1);
  const Circuit base = qcnn(2, true);
  // One convolution block (4 U3 + 3 two-qubit rotations) then one pooling block.
  std::size_t cu3 = 0;
  std::size_t conv = 0;
  for (const auto& g : base.gates()) {
    if (g.kind == GateKind::kControlledU3) ++cu3;
    if (g.name == "RXX") ++conv;
  }
  EXPECT_EQ(cu3, 1u);
  EXPECT_EQ(conv, 1u);
  EXPECT_EQ(base.param_count(), 18);
  EXPECT_EQ(base.gates().back().kind, GateKind::kControlledU3);
  EXPECT_THROW(qcnn(1, true), std::invalid_argument);
}

TEST(Qcnn, SlotsSharedWithinLevel) {
  const Circuit c = qcnn(8, true, 1);
  EXPECT_EQ(c.param_count(), 3 * 18);
  std::set<std::vector<int>> rxx_slots;
  for (const auto& g : c.gates()) {
    if (g.name == "RXX") rxx_slots.insert(g.slots);
  }
  EXPECT_EQ(rxx_slots.size(), 3u);  // one shared slot per level
}

TEST(Qcnn, RingFlagDropsWraparoundBlocks) {
  auto count = [](const Circuit& c) {
    std::size_t k = 0;
    for (const auto& g : c.gates()) k += g.name == "RXX";
    return k;
  };
  EXPECT_GT(count(qcnn(8, true)), count(qcnn(8, false)));
}

TEST(Qcnn, SharedBlocksCommuteUnderTranslation) {
  // Translating a translation-invariant input by one site and undoing it on
  // the output leaves a single ring convolution level unchanged.
  Rng rng(3);
  Circuit c(4);
  const int s = c.add_slots(15);
  auto block = [&](int a, int b) {
    c.u3(a, s, s + 1, s + 2);
    c.u3(b, s + 3, s + 4, s + 5);
    c.pauli_rotation(PauliString(4, {{a, Pauli::X}, {b, Pauli::X}}), s + 6);
    c.pauli_rotation(PauliString(4, {{a, Pauli::Y}, {b, Pauli::Y}}), s + 7);
    c.pauli_rotation(PauliString(4, {{a, Pauli::Z}, {b, Pauli::Z}}), s + 8);
    c.u3(a, s + 9, s + 10, s + 11);
    c.u3(b, s + 12, s + 13, s + 14);
  };
  block(0, 1);
  block(2, 3);
  Circuit d(4);
  d.add_slots(15);
  auto block_d = [&](int a, int b) {
    d.u3(a, s, s + 1, s + 2);
    d.u3(b, s + 3, s + 4, s + 5);
    d.pauli_rotation(PauliString(4, {{a, Pauli::X}, {b, Pauli::X}}), s + 6);
    d.pauli_rotation(PauliString(4, {{a, Pauli::Y}, {b, Pauli::Y}}), s + 7);
    d.pauli_rotation(PauliString(4, {{a, Pauli::Z}, {b, Pauli::Z}}), s + 8);
    d.u3(a, s + 9, s + 10, s + 11);
    d.u3(b, s + 12, s + 13, s + 14);
  };
  block_d(2, 3);
  block_d(0, 1);
  const RealVector t = random_angles(15, rng);
  EXPECT_LT(max_abs(unitary(c, t) - unitary(d, t)), 1e-12);
}

TEST(Hva, CountsAndOrder) {
  const Circuit c = hva_cluster(8, 10);
  EXPECT_EQ(c.param_count(), 30);
  const Circuit one = hva_cluster(3, 1);
  ASSERT_EQ(one.gates().size(), 3u);
  EXPECT_EQ(one.gates()[0].name, "HVA_X");
  EXPECT_EQ(one.gates()[1].name, "HVA_Z");
  EXPECT_EQ(one.gates()[2].name, "HVA_ZXZ");
  // Rightmost factor first: U = e^{-iθ3 ZXZ} e^{-iθ2 Z} e^{-iθ1 X}.
  RealVector t(3);
  t << 0.4, 0.9, 1.3;
  auto expo = [](const std::vector<PauliString>& terms, double th) {
    return herm_fn_complex(pauli_sum_matrix(terms), [th](double v) { return std::exp(Complex(0.0, -th * v)); });
  };
  std::vector<PauliString> xs, zs;
  for (int q = 0; q < 3; ++q) {
    xs.emplace_back(3, std::map<int, Pauli>{{q, Pauli::X}});
    zs.emplace_back(3, std::map<int, Pauli>{{q, Pauli::Z}});
  }
  const Matrix want = expo(cluster_zxz_terms(3), t(2)) * expo(zs, t(1)) * expo(xs, t(0));
  EXPECT_LT(max_abs(unitary(one, t) - want), 1e-12);
}

TEST(Gradient, AdjointMatchesFiniteDifference) {
  Rng rng(4);
  for (const Circuit& c : {hea(3, 2), qcnn(4, true, 1), hva_cluster(4, 2)}) {
    const RealVector t = random_angles(c.param_count(), rng);
    const Matrix cols = random_gaussian_matrix(c.dim(), 2, rng);
    RealMatrix w = RealMatrix::Random(c.dim(), 2);
    auto objective = [&](const RealVector& th) {
      const Matrix x = apply(c, th, cols);
      return (x.cwiseAbs2().cwiseProduct(w)).sum();
    };
    const RealVector g = diagonal_expectation_gradient(c, t, apply(c, t, cols), w);
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      RealVector up = t, down = t;
      up(k) += 1e-5;
      down(k) -= 1e-5;
      EXPECT_NEAR(g(k), (objective(up) - objective(down)) / 2e-5, 1e-6);
    }
  }
}

TEST(Text, RoundTrip) {
  Rng rng(5);
  for (const Circuit& c : {hea(3, 2, true), qcnn(8, false, 2), hva_cluster(4, 3)}) {
    const std::string text = to_text(c);
    const Circuit back = circuit_from_text(text);
    EXPECT_EQ(to_text(back), text);
    const RealVector t = random_angles(c.param_count(), rng);
    EXPECT_LT(max_abs(unitary(back, t) - unitary(c, t)), 1e-12);
  }
  EXPECT_THROW(circuit_from_text("nonsense"), std::invalid_argument);
}

TEST(Circuit, RejectsBadGates) {
  Circuit c(2);
  EXPECT_THROW(c.pauli_rotation(PauliString(2, {{0, Pauli::X}}), 0), std::out_of_range);
  EXPECT_THROW(c.swap(0, 2), std::out_of_range);
}

}  // namespace
}  // namespace qvar
