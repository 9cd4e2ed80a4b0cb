#pragma once

// Convex mixtures ρ_α = α ρ1 + (1 - α) 𝟙/2^n with ρ1 = r|v1><v1| + (1-r)|v2><v2|:
// closed-form optimal observables and variances, and brute-force oracles
// for the projector optimality argument.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qvar/fisher.hpp"
#include "qvar/observables.hpp"

namespace qvar::mixture {

struct MixtureModel {
  int n = 2;
  double r = 0.5;
  Vector v1;
  Vector v2;

  MixtureModel(int qubits, double weight, Vector first, Vector second);
  /// v1 = GHZ+, v2 = GHZ-.
  static MixtureModel ghz(int qubits, double weight);

  [[nodiscard]] Eigen::Index dim() const { return Eigen::Index{1} << n; }
  [[nodiscard]] Matrix rho1() const;
  [[nodiscard]] Matrix rho2() const;
  [[nodiscard]] Matrix rho(double alpha) const;
  /// Labeled family over α ∈ [0, 1].
  [[nodiscard]] StateFamily family() const;
  /// Orthonormal basis whose first two columns are the eigenvectors of ρ1
  /// in descending eigenvalue order.
  [[nodiscard]] Matrix eigenbasis() const;
};

/// I_q(ρ_{1/2}) = 4 - 8(r-1)/(2^n(r-1)-1) - 8r/(2^n r+1).
double qfi_half_closed(int n, double r);

/// The α-dependent closed form as printed,
///   (α D E - 2r(1-D) + 2^n - 1) / ((1-α)(1-αD)(1-αE)),
/// D = 1 - 2^n(1+r), E = 1 - 2^n r. It does not agree with the spectral QFI;
/// use only through check_printed_qfi.
double qfi_printed(double alpha, int n, double r);

/// Σ (∂λ_k)²/λ_k over the α-dependent spectrum of ρ_α (commuting family).
double qfi_commuting(double alpha, int n, double r);

struct PrintedQfiCheck {
  double printed = 0.0;
  double oracle = 0.0;
  bool agrees = false;  // relative 1e-8
};
PrintedQfiCheck check_printed_qfi(double alpha, int n, double r);

/// Eigenvalues of the globally optimal observable when all qubits are read:
/// (λ1, λ2, λ3, …, λ3) attached to (v1, v2, rest).
RealVector optimal_eigenvalues_full(int n, double r);

/// One value per outcome: 1 for the block containing v1 and v2, 1/(1-2^m)
/// for the others. Throws std::invalid_argument unless 1 <= m < n.
RealVector optimal_eigenvalues_partial(int n, int m);

/// Variance of the full-measurement optimum at α.
double variance_full(double alpha, int n, double r);
/// (1 - α)(1/(2^m - 1) + α).
double variance_partial(double alpha, int m);

/// 4(2^m - 1)/(2^m + 1): CFI of the optimal rank-constrained projectors at α = 1/2.
double cfi_optimal_partial(int m);

struct TotalVariance {
  double via_fisher = 0.0;  // 1/I_c - 1/12
  double direct = 0.0;      // ∫ variance_partial dα = 1/(2(2^m-1)) + 1/6
};
TotalVariance total_variance_partial(int m);

/// Dense optimal observable; `measured` empty means all n qubits.
SpectralObservable optimal_observable_matrix(const MixtureModel& model,
                                             std::optional<int> measured = std::nullopt);

/// max |ρ_{1/2} M + M ρ_{1/2} - ρ_{1/2} - (2/I_q)(ρ1 - ρ2)|.
double lyapunov_residual(const MixtureModel& model, const Matrix& observable);

/// Σ q_i f(p_i/q_i), f(x) = (x-1)²/(x+1). Throws unless every q_i > 0.
double f_divergence(const RealVector& p, const RealVector& q);

/// Descending prefix sums of p_prime never exceed those of p; totals equal
/// to 1e-10.
bool check_majorization(const RealVector& p_prime, const RealVector& p);

struct OptimalityReport {
  int trials = 0;
  double optimal = 0.0;     // f-divergence of the optimal projectors
  double best_found = 0.0;  // largest over random families
  int exceedances = 0;      // trials above optimal + 1e-10
  int majorization_failures = 0;
  [[nodiscard]] bool passed() const { return exceedances == 0 && majorization_failures == 0; }
};

/// Conjugates the optimal rank-2^(n-m) family by `trials` unitaries, Haar
/// random and near-identity in turn, and compares f-divergences and
/// majorization.
OptimalityReport projector_optimality_oracle(const MixtureModel& model, int m, int trials,
                                             std::uint64_t seed);

struct SelfTestReport {
  std::vector<std::string> failures;
  [[nodiscard]] bool passed() const { return failures.empty(); }
};

/// Validates the closed forms against dense oracles at n ∈ {2, 3}.
SelfTestReport self_test();

}  // namespace qvar::mixture
