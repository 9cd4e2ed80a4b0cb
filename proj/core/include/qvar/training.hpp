#pragma once

// Readout training: fit eigenvalues λ and circuit angles θ so that
//   w_ls Σ_j (α_j - <M>_j)² + w_var Σ_j Δ²_j M
// is minimal over a labeled training set.

#include <cstdint>
#include <vector>

#include "qvar/bfgs.hpp"
#include "qvar/circuits.hpp"
#include "qvar/fisher.hpp"
#include "qvar/observables.hpp"

namespace qvar {

struct TrainSet {
  std::vector<LabeledState> items;

  explicit TrainSet(std::vector<LabeledState> states);
  [[nodiscard]] RealVector labels() const;
  [[nodiscard]] std::size_t size() const { return items.size(); }
};

/// `count` equidistant labels over [lo, hi], both ends included.
TrainSet make_trainset(const StateFamily& family, int count, double lo, double hi);

enum class GradientMethod {
  kAdjoint,           // analytic λ part, reverse sweep through the circuit for θ
  kFiniteDifference,  // central differences with TrainConfig::grad_step
};

struct TrainConfig {
  double w_ls = 1.0;
  double w_var = 1e-4;
  std::uint64_t seed = 0;
  int restarts = 5;
  int max_iters = 500;
  double grad_step = 1e-5;
  double conv_tol = 1e-7;
  GradientMethod gradient = GradientMethod::kAdjoint;

  /// Throws std::invalid_argument on non-positive weights, counts or steps.
  void validate() const;
};

struct TrainResult {
  RealVector lambdas;
  RealVector theta;
  std::vector<double> loss_history;  // best restart
  double loss = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> restart_losses;
};

/// Loss over packed parameters x = (λ, θ). The training states are folded
/// into a StateBatch once, so repeated evaluation is cheap.
class Objective {
 public:
  Objective(const Circuit& circuit, int m, const TrainSet& trainset, const TrainConfig& config);

  [[nodiscard]] Eigen::Index size() const { return outcomes_ + circuit_.param_count(); }
  [[nodiscard]] Eigen::Index outcomes() const { return outcomes_; }
  [[nodiscard]] double value(const RealVector& x) const;
  /// Adjoint gradient; returns the loss.
  double value_and_gradient(const RealVector& x, RealVector& grad) const;
  /// Central finite differences over every packed coordinate.
  [[nodiscard]] RealVector fd_gradient(const RealVector& x, double step) const;

 private:
  double evaluate(const RealVector& x, RealVector* grad) const;

  const Circuit& circuit_;
  int m_;
  Eigen::Index outcomes_;
  StateBatch batch_;
  RealVector labels_;
  double w_ls_;
  double w_var_;
};

RealVector pack(const RealVector& lambdas, const RealVector& theta);

double loss(const RealVector& lambdas, const RealVector& theta, const TrainSet& trainset,
            const TrainConfig& config, const Circuit& circuit, int m);
RealVector gradient(const RealVector& lambdas, const RealVector& theta, const TrainSet& trainset,
                    const TrainConfig& config, const Circuit& circuit, int m);

/// Best of config.restarts seeded runs. λ starts at the label midpoint with a
/// small jitter, θ uniform in [0, 2π).
TrainResult train(const Circuit& circuit, int m, const TrainSet& trainset, const TrainConfig& config);

}  // namespace qvar
