#pragma once

#include <map>
#include <string>
#include <vector>

#include "qvar/linalg.hpp"

namespace qvar {

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

/// coefficient · ⊗_q letters[q], identity on unlisted qubits. Qubits are
/// 0-based with qubit 0 the most significant bit.
struct PauliString {
  int n = 0;
  std::map<int, Pauli> letters;
  double coefficient = 1.0;

  PauliString() = default;
  PauliString(int num_qubits, std::map<int, Pauli> ls, double coeff = 1.0);

  /// Parses e.g. "X0 Z2" (letter followed by qubit index, whitespace separated).
  static PauliString parse(int num_qubits, const std::string& text, double coeff = 1.0);

  /// Bits flipped by X and Y letters.
  [[nodiscard]] std::uint64_t flip_mask() const;
  /// Bits contributing a (-1) sign (Z and Y letters).
  [[nodiscard]] std::uint64_t sign_mask() const;
  [[nodiscard]] int y_count() const;
  [[nodiscard]] bool commutes_with(const PauliString& other) const;
  [[nodiscard]] std::string label() const;  // "X0 Z2", "I" for identity
};

/// Sparse action of a unit-coefficient Pauli string: P|b> = phase(b) |b ^ flip>.
struct PauliAction {
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
  Complex y_phase{1.0, 0.0};  // i^{#Y}

  explicit PauliAction(const PauliString& p);
  [[nodiscard]] Complex phase(std::uint64_t b) const;
};

Matrix pauli_matrix(const PauliString& p);
Matrix pauli_sum_matrix(const std::vector<PauliString>& terms);

/// Σ_i Z_i Z_{i+1} + h Σ_i X_i, periodic (Z_n ≡ Z_0). For n = 2 the wraparound
/// bond duplicates the single bond.
Matrix ising(int n, double h);
std::vector<PauliString> ising_terms(int n, double h);

struct SchwingerCouplings {
  double w = 1.0;
  double g = 1.0;
  double eps0 = 0.0;
};

/// w Σ_{j<n} (X_j X_{j+1} + Y_j Y_{j+1}) + (μ/2) Σ_j (-1)^j Z_j
///   + g Σ_j (ε0 - ½ Σ_{l<=j} (Z_l + (-1)^j 𝟙)),
/// with 1-based site index j in the signs. The field term is linear (no
/// square) and the (-1)^j shift uses the outer index, exactly as written in
/// the model definition this was taken from. Requires even n.
Matrix schwinger(int n, double mu, const SchwingerCouplings& c = {});

/// -cos(πx/2) Σ Z_i X_{i+1} Z_{i+2} - sin(πx/2) Σ X_i - ε Σ Z_i, periodic.
Matrix cluster(int n, double x, double eps = 1e-2);
std::vector<PauliString> cluster_zxz_terms(int n);

}  // namespace qvar
