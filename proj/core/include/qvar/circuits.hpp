#pragma once

// Parametrized circuits: gate lists with shared parameter slots, the three
// ansatz families used for readout training, and dense simulation.
//
// Every parametrized gate compiles to a product of elementary Pauli
// rotations exp(-i c θ_s P) (or a dense exponential for non-commuting
// generator sums), which is what makes the adjoint gradient cheap.

#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qvar/hamiltonians.hpp"
#include "qvar/linalg.hpp"

namespace qvar {

enum class GateKind {
  kPauliRotation,     // exp(-i θ P), one slot
  kU3,                // R_Z(φ) R_Y(θ) R_Z(λ), slots (θ, φ, λ)
  kControlledU3,      // |0><0| ⊗ 𝟙 + |1><1| ⊗ U3 on (control, target)
  kPauliSumRotation,  // exp(-i θ Σ_k c_k P_k), one slot
  kSwap,              // fixed qubit relabeling, no slots
};

struct Gate {
  GateKind kind = GateKind::kPauliRotation;
  std::string name;
  std::vector<int> qubits;
  std::vector<int> slots;
  std::vector<PauliString> generators;
};

namespace detail {
struct RotationOp {
  PauliAction action;
  double coeff;
  int slot;
};
struct DenseRotationOp {
  std::shared_ptr<const Matrix> generator;
  std::shared_ptr<const EigenSystem> eig;
  double coeff;
  int slot;
};
struct SwapOp {
  std::uint64_t bit_a;
  std::uint64_t bit_b;
};
using Op = std::variant<RotationOp, DenseRotationOp, SwapOp>;
}  // namespace detail

class Circuit {
 public:
  explicit Circuit(int num_qubits);

  [[nodiscard]] int num_qubits() const { return n_; }
  [[nodiscard]] Eigen::Index dim() const { return Eigen::Index{1} << n_; }
  [[nodiscard]] int param_count() const { return param_count_; }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] const std::vector<detail::Op>& ops() const { return ops_; }

  /// Reserves `count` fresh parameter slots and returns the first index.
  int add_slots(int count);

  Circuit& add(Gate gate);
  Circuit& pauli_rotation(const PauliString& generator, int slot, std::string name = "");
  Circuit& u3(int qubit, int slot_theta, int slot_phi, int slot_lambda);
  Circuit& controlled_u3(int control, int target, int slot_theta, int slot_phi, int slot_lambda);
  Circuit& pauli_sum_rotation(std::vector<PauliString> generators, int slot, std::string name = "");
  Circuit& swap(int a, int b);

 private:
  void compile(const Gate& g);

  int n_;
  int param_count_ = 0;
  std::vector<Gate> gates_;
  std::vector<detail::Op> ops_;
};

/// U(θ)·columns, first gate applied first.
Matrix apply(const Circuit& c, const RealVector& theta, Matrix columns);
/// U(θ)†·columns.
Matrix apply_adjoint(const Circuit& c, const RealVector& theta, Matrix columns);
/// Dense U(θ). Throws std::invalid_argument if theta has the wrong length.
Matrix unitary(const Circuit& c, const RealVector& theta);

/// Gradient with respect to θ of Σ_c Σ_b weights(b, c) |(U φ_c)_b|², given the
/// already propagated columns X = U(θ)Φ. Adjoint (reverse) sweep; shared slots
/// accumulate contributions from every gate that reads them.
RealVector diagonal_expectation_gradient(const Circuit& c, const RealVector& theta,
                                         Matrix final_columns, const RealMatrix& weights);

/// Hardware-efficient ansatz: per layer R_X then R_Z on every qubit, then R_ZZ
/// on (i, i+1) for an open chain. layers·(3n - 1) slots.
/// closing_rotations appends one more R_X, R_Z layer (2n slots). Without it the
/// last R_Z and R_ZZ gates are diagonal and drop out of any Z-basis readout.
Circuit hea(int n, int layers, bool closing_rotations = false);

/// Convolution/pooling network. Each level applies a shared convolution block
/// C = (U3⊗U3)·R_XX·R_YY·R_ZZ·(U3⊗U3) (15 slots) on neighbouring active qubits
/// and a shared controlled-U3 pooling block (3 slots) on disjoint pairs; the
/// control qubit of each pair drops out of later levels. Levels continue while
/// halving keeps at least `measured` active qubits. If more than one qubit
/// survives, a final convolution level acts on the survivors, and SWAPs move
/// the survivors onto the last qubits so they are the measured ones.
/// With ring_convolutions=false the block between the first and last active
/// qubits is dropped (it is kept when only two qubits are active).
Circuit qcnn(int n, bool ring_convolutions, int measured = 1);

/// Number of pooling levels qcnn(n, ·, measured) builds.
int qcnn_levels(int n, int measured = 1);

/// Hamiltonian variational ansatz for the cluster model: per layer
/// exp(-iθ₃ Σ Z X Z) exp(-iθ₂ Σ Z) exp(-iθ₁ Σ X), the X sum applied first.
Circuit hva_cluster(int n, int layers);

/// Line-oriented dump: a header line, then one gate per line with its
/// targets, slots and generator terms.
void write_circuit(std::ostream& out, const Circuit& c);
std::string to_text(const Circuit& c);
Circuit parse_circuit(std::istream& in);
Circuit circuit_from_text(const std::string& text);

}  // namespace qvar
