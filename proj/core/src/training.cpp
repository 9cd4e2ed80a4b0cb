#include "qvar/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qvar {

TrainSet::TrainSet(std::vector<LabeledState> states) : items(std::move(states)) {
  if (items.size() < 2) throw std::invalid_argument("TrainSet: need at least two items");
  for (const auto& s : items) {
    if (s.dim() != items.front().dim()) throw std::invalid_argument("TrainSet: dimension mismatch");
  }
}

RealVector TrainSet::labels() const {
  RealVector out(static_cast<Eigen::Index>(items.size()));
  for (std::size_t j = 0; j < items.size(); ++j) out(static_cast<Eigen::Index>(j)) = items[j].label();
  return out;
}

TrainSet make_trainset(const StateFamily& family, int count, double lo, double hi) {
  if (count < 2) throw std::invalid_argument("make_trainset: count must be >= 2");
  if (!(lo < hi)) throw std::invalid_argument("make_trainset: need lo < hi");
  std::vector<LabeledState> items;
  items.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double a = j + 1 == count ? hi : lo + (hi - lo) * j / (count - 1);
    items.push_back(family.at(a));
  }
  return TrainSet(std::move(items));
}

void TrainConfig::validate() const {
  if (!(w_ls > 0.0)) throw std::invalid_argument("w_ls must be positive");
  if (!(w_var >= 0.0)) throw std::invalid_argument("w_var must be nonnegative");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(grad_step > 0.0)) throw std::invalid_argument("grad_step must be positive");
  if (!(conv_tol > 0.0)) throw std::invalid_argument("conv_tol must be positive");
}

Objective::Objective(const Circuit& circuit, int m, const TrainSet& trainset, const TrainConfig& config)
    : circuit_(circuit),
      m_(m),
      outcomes_(Eigen::Index{1} << m),
      batch_(trainset.items),
      labels_(trainset.labels()),
      w_ls_(config.w_ls),
      w_var_(config.w_var) {
  if (m < 1 || m > circuit.num_qubits()) throw std::invalid_argument("Objective: bad measured count");
  if (batch_.dim() != circuit.dim()) throw std::invalid_argument("Objective: dimension mismatch");
}

double Objective::value(const RealVector& x) const { return evaluate(x, nullptr); }

double Objective::value_and_gradient(const RealVector& x, RealVector& grad) const {
  return evaluate(x, &grad);
}

double Objective::evaluate(const RealVector& x, RealVector* grad) const {
  if (x.size() != size()) throw std::invalid_argument("Objective: parameter length mismatch");
  const RealVector lambdas = x.head(outcomes_);
  const RealVector theta = x.tail(circuit_.param_count());
  Matrix final_columns;
  const RealMatrix p = batch_probabilities(circuit_, theta, m_, batch_,
                                           grad != nullptr ? &final_columns : nullptr);
  const RealVector mean = p * lambdas;
  const RealVector second = p * lambdas.cwiseAbs2();
  const RealVector residual = mean - labels_;
  const RealVector var = second - mean.cwiseAbs2();
  const double value = w_ls_ * residual.squaredNorm() + w_var_ * var.cwiseMax(0.0).sum();
  if (!std::isfinite(value)) throw std::domain_error("Objective: non-finite loss");
  if (grad == nullptr) return value;

  // dL/dP_ji = 2 w_ls (E_j - α_j) λ_i + w_var (λ_i² - 2 E_j λ_i)
  const RealMatrix dp = (2.0 * w_ls_ * residual - 2.0 * w_var_ * mean) * lambdas.transpose() +
                        w_var_ * RealVector::Ones(p.rows()) * lambdas.cwiseAbs2().transpose();
  grad->resize(size());
  // dL/dλ_i = Σ_j P_ji [2 w_ls (E_j - α_j) + w_var (2 λ_i - 2 E_j)]
  grad->head(outcomes_) = p.transpose() * (2.0 * w_ls_ * residual - 2.0 * w_var_ * mean) +
                          2.0 * w_var_ * lambdas.cwiseProduct(p.colwise().sum().transpose());

  const RealMatrix per_column = batch_.weights().transpose() * dp;  // C × 2^m
  const Eigen::Index mask = outcomes_ - 1;
  RealMatrix cell(final_columns.rows(), final_columns.cols());
  for (Eigen::Index c = 0; c < cell.cols(); ++c) {
    for (Eigen::Index b = 0; b < cell.rows(); ++b) cell(b, c) = per_column(c, b & mask);
  }
  grad->tail(circuit_.param_count()) =
      diagonal_expectation_gradient(circuit_, theta, std::move(final_columns), cell);
  return value;
}

RealVector Objective::fd_gradient(const RealVector& x, double step) const {
  RealVector g(x.size());
  RealVector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe(k) = x(k) + step;
    const double up = value(probe);
    probe(k) = x(k) - step;
    const double down = value(probe);
    probe(k) = x(k);
    g(k) = (up - down) / (2.0 * step);
  }
  return g;
}

RealVector pack(const RealVector& lambdas, const RealVector& theta) {
  RealVector x(lambdas.size() + theta.size());
  x << lambdas, theta;
  return x;
}

double loss(const RealVector& lambdas, const RealVector& theta, const TrainSet& trainset,
            const TrainConfig& config, const Circuit& circuit, int m) {
  return Objective(circuit, m, trainset, config).value(pack(lambdas, theta));
}

RealVector gradient(const RealVector& lambdas, const RealVector& theta, const TrainSet& trainset,
                    const TrainConfig& config, const Circuit& circuit, int m) {
  return Objective(circuit, m, trainset, config).fd_gradient(pack(lambdas, theta), config.grad_step);
}

TrainResult train(const Circuit& circuit, int m, const TrainSet& trainset, const TrainConfig& config) {
  config.validate();
  const Objective objective(circuit, m, trainset, config);
  const RealVector labels = trainset.labels();
  const double mid = 0.5 * (labels.minCoeff() + labels.maxCoeff());
  const double spread = std::max(labels.maxCoeff() - labels.minCoeff(), 1e-3);

  ValueAndGradient fg;
  if (config.gradient == GradientMethod::kAdjoint) {
    fg = [&](const RealVector& x, RealVector& g) { return objective.value_and_gradient(x, g); };
  } else {
    fg = [&](const RealVector& x, RealVector& g) {
      g = objective.fd_gradient(x, config.grad_step);
      return objective.value(x);
    };
  }
  BfgsOptions options;
  options.max_iters = config.max_iters;
  options.grad_tol = config.conv_tol;

  TrainResult best;
  best.loss = std::numeric_limits<double>::infinity();
  for (int k = 0; k < config.restarts; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    Rng rng(seq);
    std::uniform_real_distribution<double> jitter(-0.05 * spread, 0.05 * spread);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    RealVector x(objective.size());
    for (Eigen::Index i = 0; i < objective.outcomes(); ++i) x(i) = mid + jitter(rng);
    for (Eigen::Index i = objective.outcomes(); i < x.size(); ++i) x(i) = angle(rng);

    const BfgsResult run = minimize_bfgs(fg, x, options);
    best.restart_losses.push_back(run.value);
    if (run.value < best.loss) {
      best.loss = run.value;
      best.lambdas = run.x.head(objective.outcomes());
      best.theta = run.x.tail(circuit.param_count());
      best.loss_history = run.history;
      best.converged = run.converged;
      best.iterations = run.iterations;
    }
  }
  return best;
}

}  // namespace qvar
