#pragma once

// Classical and quantum Fisher information of one-parameter state families,
// the symmetric logarithmic derivative, and the Cramér–Rao chain
//
//   Δ²M / |∂_α<M>|²  >=  1/I_c  >=  1/I_q.
//
// α-derivatives are central finite differences: 1e-4 for probabilities and
// expectations, 1e-5 for state vectors.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvar/observables.hpp"
#include "qvar/states.hpp"

namespace qvar {

inline constexpr double kProbabilityStep = 1e-4;
inline constexpr double kStateStep = 1e-5;

struct StateFamily {
  std::function<LabeledState(double)> evaluator;
  double lo = 0.0;
  double hi = 1.0;

  /// Throws std::out_of_range outside [lo, hi].
  [[nodiscard]] LabeledState at(double alpha) const;
  [[nodiscard]] bool contains(double alpha) const { return alpha >= lo && alpha <= hi; }
};

/// Raised when a vanishing outcome probability has a non-vanishing
/// derivative, i.e. the classical Fisher information diverges.
class FisherDivergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Σ (∂p_i)²/p_i with p at α and central differences from p(α ± step).
/// Terms with p_i < 1e-12 and |∂p_i| < 1e-8 are dropped.
double cfi_from_probabilities(const RealVector& p_minus, const RealVector& p, const RealVector& p_plus,
                              double step);

/// CFI of the projective measurement {Λ_i} on the family at α.
double cfi(const StateFamily& family, const std::vector<Matrix>& projectors, double alpha,
           double step = kProbabilityStep);

/// Σ (p1_i - p2_i)² / (α p1_i + (1-α) p2_i); 0/0 terms skipped.
double cfi_mixture_closed(double alpha, const RealVector& p1, const RealVector& p2);

struct FidelityQfi {
  double value = 0.0;      // 8(1 - F(ρ_α, ρ_{α+dα}))/dα²
  double half_step = 0.0;  // same with dα/2
  double extrapolated = 0.0;  // 2·half_step - value, cancels the O(dα) bias
  bool consistent = true;  // value and half_step agree to relative 1e-2
};

/// Uhlmann fidelity of two labeled states; uses |<ψ|φ>| when both are pure.
double state_fidelity(const LabeledState& a, const LabeledState& b);

FidelityQfi qfi_fidelity(const StateFamily& family, double alpha, double dalpha = 1e-3);

/// 2 Σ_{λ_i+λ_j > 1e-12} |<i|∂ρ|j>|² / (λ_i + λ_j) in the eigenbasis of ρ.
double qfi_spectral(const Matrix& rho, const Matrix& drho);

/// 4(<∂ψ|∂ψ> - |<ψ|∂ψ>|²).
double qfi_pure(const Vector& psi, const Vector& dpsi);

/// Hermitian L with ½(ρL + Lρ) = ∂ρ. Requires ρ strictly positive.
Matrix sld(const Matrix& rho, const Matrix& drho);

/// Central-difference ∂ρ.
Matrix density_derivative(const StateFamily& family, double alpha, double step = kProbabilityStep);

/// Central-difference ∂ψ of a pure family. Neighbouring states are phase
/// aligned to ψ(α) and renormalized before differencing.
Vector state_derivative(const StateFamily& family, double alpha, double step = kStateStep);

/// QFI at α from the analytic formulas with finite-difference derivatives:
/// qfi_pure for pure families, qfi_spectral otherwise.
double qfi(const StateFamily& family, double alpha);

struct FisherReport {
  double alpha = 0.0;
  double expectation = 0.0;
  double derivative = 0.0;  // ∂_α<M>
  double variance = 0.0;
  double adjusted_variance = 0.0;  // NaN when |∂_α<M>| < 1e-10
  double inv_cfi = 0.0;
  double inv_qfi = 0.0;
  std::vector<std::string> diagnostics;

  /// The chain holds with slack 1e-6·max(1, |value|).
  [[nodiscard]] bool chain_holds() const;
  [[nodiscard]] bool ok() const { return diagnostics.empty(); }
};

/// Probabilities of a readout for a given state.
using Readout = std::function<RealVector(const LabeledState&)>;

FisherReport chain_report(const Readout& readout, const RealVector& lambdas,
                          const StateFamily& family, double alpha);

std::vector<FisherReport> bound_chain(const ParamObservable& obs, const RealVector& theta,
                                      const StateFamily& family, const RealVector& alphas);
std::vector<FisherReport> bound_chain(const SpectralObservable& obs, const StateFamily& family,
                                      const RealVector& alphas);

}  // namespace qvar
