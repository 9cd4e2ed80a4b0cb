#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qvar/linalg.hpp"

namespace qvar {
namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

TEST(Kron, IdentityAndPaulis) {
  EXPECT_LT(max_abs(kron(identity(2), identity(2)) - identity(4)), 1e-15);
  Matrix zz = Matrix::Zero(4, 4);
  zz.diagonal() << 1, -1, -1, 1;
  EXPECT_LT(max_abs(kron(pauli_z(), pauli_z()) - zz), 1e-15);
  Vector zero = Vector::Zero(4);
  zero(0) = 1;
  const Vector flipped = kron(pauli_x(), pauli_x()) * zero;
  EXPECT_NEAR(std::abs(flipped(3)), 1.0, 1e-15);
}

TEST(Kron, IndexLayoutAndAssociativity) {
  Rng rng(1);
  const Matrix a = random_gaussian_matrix(2, 3, rng);
  const Matrix b = random_gaussian_matrix(3, 2, rng);
  const Matrix c = random_gaussian_matrix(2, 2, rng);
  const Matrix ab = kron(a, b);
  ASSERT_EQ(ab.rows(), 6);
  ASSERT_EQ(ab.cols(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 2; ++l) EXPECT_EQ(ab(i * 3 + k, j * 2 + l), a(i, j) * b(k, l));
  EXPECT_LT(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))), 1e-12);
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const Matrix rho = bell * bell.adjoint();
  const std::vector<int> discard{1};
  EXPECT_LT(max_abs(partial_trace(rho, 2, discard) - identity(2) / 2.0), 1e-15);
}

TEST(PartialTrace, ProductStateAndTrace) {
  Rng rng(2);
  const Matrix rho = random_density(4, rng);
  const Matrix sigma = random_density(2, rng);
  const std::vector<int> last{2};
  EXPECT_LT(max_abs(partial_trace(kron(rho, sigma), 3, last) - rho), 1e-12);
  const std::vector<int> first{0};
  EXPECT_LT(max_abs(partial_trace(kron(rho, sigma), 3, first) - kron(partial_trace(rho, 2, first), sigma)),
            1e-12);

  for (int t = 0; t < 20; ++t) {
    const Matrix h = random_hermitian(16, rng);
    const std::vector<int> discard{0, 2};
    const Matrix red = partial_trace(h, 4, discard);
    ASSERT_EQ(red.rows(), 4);
    EXPECT_NEAR(std::abs(red.trace() - h.trace()), 0.0, 1e-12);
  }
}

TEST(PartialTrace, RejectsBadIndex) {
  const std::vector<int> bad{3};
  EXPECT_THROW(partial_trace(identity(4), 2, bad), std::out_of_range);
}

TEST(HermEig, PauliExamples) {
  const EigenSystem z = herm_eig(pauli_z());
  EXPECT_NEAR(z.values(0), -1.0, 1e-15);
  EXPECT_NEAR(z.values(1), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(z.vectors(1, 0) - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z.vectors(0, 1) - Complex(1.0)), 0.0, 1e-15);

  const EigenSystem x = herm_eig(pauli_x());
  const double s = 1.0 / std::sqrt(2.0);
  // Phase convention: first significant component real positive.
  EXPECT_NEAR(std::abs(x.vectors(0, 0) - Complex(s)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(x.vectors(1, 0) - Complex(-s)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(x.vectors(0, 1) - Complex(s)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(x.vectors(1, 1) - Complex(s)), 0.0, 1e-12);
}

TEST(HermEig, ReconstructionOnRandomMatrices) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Matrix a = random_hermitian(8, rng);
    const EigenSystem sys = herm_eig(a);
    const Matrix rebuilt = sys.vectors * sys.values.cast<Complex>().asDiagonal() * sys.vectors.adjoint();
    EXPECT_LT(max_abs(rebuilt - a), 1e-10);
    EXPECT_LT(max_abs(sys.vectors.adjoint() * sys.vectors - identity(8)), 1e-10);
    for (Eigen::Index i = 1; i < 8; ++i) EXPECT_LE(sys.values(i - 1), sys.values(i));
    for (Eigen::Index c = 0; c < 8; ++c) {
      Eigen::Index first = 0;
      while (std::abs(sys.vectors(first, c)) <= 1e-10) ++first;
      EXPECT_NEAR(sys.vectors(first, c).imag(), 0.0, 1e-12);
      EXPECT_GT(sys.vectors(first, c).real(), 0.0);
    }
  }
}

TEST(HermEig, RejectsNonHermitian) {
  Matrix a = pauli_x();
  a(0, 1) = 2.0;
  EXPECT_THROW(herm_eig(a), std::invalid_argument);
}

TEST(HermFn, Examples) {
  EXPECT_LT(max_abs(herm_fn(identity(4), [](double v) { return std::sqrt(v); }) - identity(4)), 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  Matrix want = Matrix::Zero(2, 2);
  want.diagonal() << 2, 3;
  EXPECT_LT(max_abs(herm_fn(d, [](double v) { return std::sqrt(v); }) - want), 1e-14);
  EXPECT_THROW(herm_fn(-identity(2), [](double v) { return std::sqrt(v); }), std::domain_error);
}

TEST(HermFn, ExponentialMatchesPowerSeries) {
  const double theta = 0.3;
  const Matrix got = herm_fn_complex(pauli_z(), [&](double t) { return std::exp(Complex(0.0, -theta * t)); });
  // Truncated series of exp(-iθZ) to order 20.
  const Matrix gen = Complex(0.0, -theta) * pauli_z();
  Matrix series = identity(2);
  Matrix term = identity(2);
  for (int k = 1; k <= 20; ++k) {
    term = term * gen / static_cast<double>(k);
    series += term;
  }
  EXPECT_LT(max_abs(got - series), 1e-14);
  const Matrix closed = std::cos(theta) * identity(2) - Complex(0.0, std::sin(theta)) * pauli_z();
  EXPECT_LT(max_abs(got - closed), 1e-14);
}

TEST(PsdSqrt, SquaresBackAndClipsNoise) {
  Rng rng(4);
  const Matrix rho = random_density(8, rng);
  const Matrix s = psd_sqrt(rho);
  EXPECT_LT(max_abs(s * s - rho), 1e-12);
  Matrix noisy = Matrix::Zero(2, 2);
  noisy.diagonal() << 1.0, -1e-13;
  EXPECT_NO_THROW(psd_sqrt(noisy));
  noisy(1, 1) = -1e-6;
  EXPECT_THROW(psd_sqrt(noisy), std::domain_error);
}

TEST(Lyapunov, Examples) {
  Rng rng(5);
  const Matrix b = random_hermitian(4, rng);
  EXPECT_LT(max_abs(solve_lyapunov(identity(4) / 2.0, b) - b), 1e-13);
  const Matrix a = random_density(4, rng);
  EXPECT_LT(max_abs(solve_lyapunov(a, 2.0 * a) - identity(4)), 1e-10);
}

TEST(Lyapunov, ResidualAndHermiticityOnRandomInputs) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const Matrix a = random_density(8, rng);
    const Matrix b = random_hermitian(8, rng);
    const Matrix x = solve_lyapunov(a, b);
    EXPECT_LT(max_abs(a * x + x * a - b), 1e-10);
    EXPECT_LT(max_abs(x - x.adjoint()), 1e-12);
  }
}

TEST(Lyapunov, RejectsSingular) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  EXPECT_THROW(solve_lyapunov(a, identity(2)), std::domain_error);
}

TEST(Random, UnitaryIsUnitary) {
  Rng rng(7);
  const Matrix u = random_unitary(16, rng);
  EXPECT_LT(max_abs(u.adjoint() * u - identity(16)), 1e-12);
  EXPECT_THROW(qubit_count(6), std::invalid_argument);
  EXPECT_EQ(qubit_count(32), 5);
}

}  // namespace
}  // namespace qvar
