#pragma once

// Rank-constrained readout observables
//
//   M(λ, θ) = Σ_i λ_i U(θ)† (𝟙 ⊗ |i><i|) U(θ),
//
// where |i> runs over the computational basis of the last m qubits. Each
// eigenprojector has rank 2^(n-m).

#include <span>
#include <vector>

#include "qvar/circuits.hpp"
#include "qvar/states.hpp"

namespace qvar {

struct ParamObservable {
  int m = 1;
  RealVector lambdas;  // length 2^m
  Circuit circuit;

  ParamObservable(int measured, RealVector values, Circuit c);

  [[nodiscard]] int num_qubits() const { return circuit.num_qubits(); }
  [[nodiscard]] Eigen::Index outcomes() const { return Eigen::Index{1} << m; }
};

struct SpectralObservable {
  RealVector lambdas;
  std::vector<Matrix> projectors;

  [[nodiscard]] Matrix dense() const;
};

/// Probabilities below this are reported as exactly zero.
inline constexpr double kProbabilityFloor = 1e-14;

/// Outcome distribution over the last m qubits of U ρ U†.
RealVector probabilities(const ParamObservable& obs, const RealVector& theta, const Matrix& rho);
RealVector probabilities(const ParamObservable& obs, const RealVector& theta, const Vector& psi);
RealVector probabilities(const ParamObservable& obs, const RealVector& theta,
                         const LabeledState& state);

double expectation(const ParamObservable& obs, const RealVector& theta, const LabeledState& state);
/// Σ p λ² - (Σ p λ)², clipped at zero.
double variance(const ParamObservable& obs, const RealVector& theta, const LabeledState& state);

double expectation_from(const RealVector& probs, const RealVector& lambdas);
double variance_from(const RealVector& probs, const RealVector& lambdas);

/// Marginal over the last m qubits of a diagonal |x_b|² distribution.
RealVector marginal_last_qubits(const RealVector& diagonal, int m);

SpectralObservable matrix(const ParamObservable& obs, const RealVector& theta);

/// Tr(Λ_i ρ) for every projector, floored like the circuit path.
RealVector probabilities(const SpectralObservable& obs, const LabeledState& state);

/// ρ ⊗ |0><0|^{⊗ ancillas}; ancillas become the least significant qubits.
Matrix naimark_embed(const Matrix& rho, int ancillas);
Vector naimark_embed(const Vector& psi, int ancillas);
LabeledState naimark_embed(const LabeledState& state, int ancillas);

/// A batch of labeled states written as weighted pure columns,
///   ρ_j = Σ_c weights(j, c) |φ_c><φ_c|,
/// so one circuit sweep over the columns serves every state. Pure states map
/// to one column each. Mixed batches whose members commute share a single
/// eigenbasis; otherwise each member contributes its own eigenvectors.
class StateBatch {
 public:
  explicit StateBatch(std::span<const LabeledState> states);

  [[nodiscard]] const Matrix& columns() const { return columns_; }
  [[nodiscard]] const RealMatrix& weights() const { return weights_; }
  [[nodiscard]] Eigen::Index size() const { return weights_.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return columns_.rows(); }
  [[nodiscard]] bool shared_basis() const { return shared_basis_; }

 private:
  Matrix columns_;
  RealMatrix weights_;
  bool shared_basis_ = false;
};

/// |x_{b,c}|² of final columns, marginalized to the last m qubits: C × 2^m.
RealMatrix column_outcome_weights(const Matrix& final_columns, int m);

/// Probabilities for every member of the batch: size() × 2^m. When
/// `final_columns` is non-null it receives U(θ)·columns for reuse.
RealMatrix batch_probabilities(const Circuit& circuit, const RealVector& theta, int m,
                               const StateBatch& batch, Matrix* final_columns = nullptr);

}  // namespace qvar
