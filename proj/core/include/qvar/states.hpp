#pragma once

#include <variant>

#include "qvar/linalg.hpp"

namespace qvar {

/// A quantum state carrying a real regression label. Either a pure state
/// vector or a density matrix.
class LabeledState {
 public:
  LabeledState(Vector psi, double label);
  LabeledState(Matrix rho, double label);

  [[nodiscard]] bool is_pure() const { return std::holds_alternative<Vector>(state_); }
  [[nodiscard]] const Vector& psi() const { return std::get<Vector>(state_); }
  [[nodiscard]] const Matrix& rho() const { return std::get<Matrix>(state_); }
  /// Density matrix, built from psi for pure states.
  [[nodiscard]] Matrix density() const;
  [[nodiscard]] Eigen::Index dim() const;
  [[nodiscard]] double label() const { return label_; }

 private:
  std::variant<Vector, Matrix> state_;
  double label_;
};

/// Throws std::invalid_argument unless trace is 1 ± 1e-10, the matrix is
/// Hermitian and no eigenvalue is below -1e-10.
void check_density(const Matrix& rho);

Vector basis_state(int n, std::uint64_t index);
Matrix projector(const Vector& v);

/// alpha·rho1 + (1 - alpha)·rho2; alpha must lie in [0, 1].
Matrix mixture_state(double alpha, const Matrix& rho1, const Matrix& rho2);

/// r|v1><v1| + (1 - r)|v2><v2| for orthonormal v1, v2.
Matrix rank2_state(double r, const Vector& v1, const Vector& v2);

/// (|0...0> + sign |1...1>) / sqrt(2).
Vector ghz(int n, int sign);

/// Uhlmann fidelity Tr sqrt(sqrt(rho) tau sqrt(rho)), clipped to [0, 1].
double fidelity(const Matrix& rho, const Matrix& tau);

struct GroundState {
  Vector psi;
  double energy = 0.0;
  double gap = 0.0;
  bool degenerate = false;  // gap below 1e-10; psi is then the lowest-index eigenvector
};

GroundState ground_state(const Matrix& hamiltonian);

}  // namespace qvar
