#pragma once

// Dense complex linear algebra on small (<= 2^12) operators.
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index, so
// the "last m qubits" of an n-qubit register are the m least significant bits.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qvar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline constexpr double kHermitianTol = 1e-12;

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // column eigenvectors, unitary
};

/// Number of qubits of a 2^n dimensional operator; throws if dim is not a power of two.
int qubit_count(Eigen::Index dim);

Matrix identity(Eigen::Index dim);

/// Kronecker product, (A ⊗ B)_{(i·dB+k),(j·dB+l)} = A_ij B_kl.
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

/// Traces out the qubits listed in `discard` (0-based) of an n-qubit operator.
/// The remaining qubits keep their relative order.
Matrix partial_trace(const Matrix& a, int n, std::span<const int> discard);

double max_abs(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol = kHermitianTol);
Matrix hermitian_part(const Matrix& a);

/// Eigendecomposition of a Hermitian matrix. Values ascend; every eigenvector
/// has its first component with magnitude > 1e-10 made real and positive.
/// Throws std::invalid_argument for non-Hermitian input.
EigenSystem herm_eig(const Matrix& a);

/// V f(D) V† for a real function f applied to the spectrum.
/// Throws std::domain_error when f returns a non-finite value.
Matrix herm_fn(const Matrix& a, const std::function<double(double)>& f);
/// Complex-valued spectral function, e.g. t -> exp(-i θ t).
Matrix herm_fn_complex(const Matrix& a, const std::function<Complex(double)>& f);

/// Matrix square root of a positive semidefinite matrix; eigenvalues down to
/// -1e-12 are clipped to zero, anything more negative throws.
Matrix psd_sqrt(const Matrix& a);

/// Solves A X + X A = B for Hermitian, strictly positive A (min eigenvalue
/// > 1e-12) in the eigenbasis of A. Throws std::domain_error otherwise.
Matrix solve_lyapunov(const Matrix& a, const Matrix& b);

// Random objects. All take the generator by reference so callers control seeding.
Matrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
/// Haar-distributed unitary from QR of a complex Gaussian matrix.
Matrix random_unitary(Eigen::Index dim, Rng& rng);
Matrix random_hermitian(Eigen::Index dim, Rng& rng);
Vector random_unit_vector(Eigen::Index dim, Rng& rng);
/// Full-rank density matrix W W† / Tr(W W†).
Matrix random_density(Eigen::Index dim, Rng& rng);

}  // namespace qvar
