#include "qvar/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qvar {
namespace {

constexpr double kVanishing = 1e-12;
constexpr double kFlatDerivative = 1e-10;
constexpr double kChainSlack = 1e-6;

void require_interior(const StateFamily& family, double alpha, double step) {
  if (!family.contains(alpha - step) || !family.contains(alpha + step)) {
    throw std::out_of_range("alpha " + std::to_string(alpha) + " too close to the family range");
  }
}

double slack(double v) { return kChainSlack * std::max(1.0, std::abs(v)); }

}  // namespace

LabeledState StateFamily::at(double alpha) const {
  if (!contains(alpha)) {
    throw std::out_of_range("alpha " + std::to_string(alpha) + " outside family range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return evaluator(alpha);
}

double cfi_from_probabilities(const RealVector& p_minus, const RealVector& p, const RealVector& p_plus,
                              double step) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double d = (p_plus(i) - p_minus(i)) / (2.0 * step);
    if (p(i) < kVanishing) {
      if (std::abs(d) < 1e-8) continue;
      throw FisherDivergence("classical Fisher information diverges: outcome " + std::to_string(i) +
                             " has p = " + std::to_string(p(i)) + ", dp = " + std::to_string(d));
    }
    total += d * d / p(i);
  }
  return total;
}

double cfi(const StateFamily& family, const std::vector<Matrix>& projectors, double alpha,
           double step) {
  require_interior(family, alpha, step);
  SpectralObservable obs{RealVector::Zero(static_cast<Eigen::Index>(projectors.size())), projectors};
  return cfi_from_probabilities(probabilities(obs, family.at(alpha - step)),
                                probabilities(obs, family.at(alpha)),
                                probabilities(obs, family.at(alpha + step)), step);
}

double cfi_mixture_closed(double alpha, const RealVector& p1, const RealVector& p2) {
  if (p1.size() != p2.size()) throw std::invalid_argument("cfi_mixture_closed: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p1.size(); ++i) {
    const double num = (p1(i) - p2(i)) * (p1(i) - p2(i));
    const double den = alpha * p1(i) + (1.0 - alpha) * p2(i);
    if (den <= 0.0) {
      if (num == 0.0) continue;
      throw FisherDivergence("cfi_mixture_closed: zero denominator with nonzero numerator");
    }
    total += num / den;
  }
  return total;
}

double state_fidelity(const LabeledState& a, const LabeledState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  if (a.is_pure() && b.is_pure()) return std::min(1.0, std::abs(a.psi().dot(b.psi())));
  if (a.is_pure()) return std::sqrt(std::clamp(a.psi().dot(b.rho() * a.psi()).real(), 0.0, 1.0));
  if (b.is_pure()) return std::sqrt(std::clamp(b.psi().dot(a.rho() * b.psi()).real(), 0.0, 1.0));
  return fidelity(a.rho(), b.rho());
}

FidelityQfi qfi_fidelity(const StateFamily& family, double alpha, double dalpha) {
  if (!(dalpha > 0.0)) throw std::invalid_argument("qfi_fidelity: dalpha must be positive");
  const LabeledState here = family.at(alpha);
  const LabeledState far = family.at(alpha + dalpha);
  const LabeledState near = family.at(alpha + dalpha / 2.0);
  FidelityQfi out;
  out.value = 8.0 * (1.0 - state_fidelity(here, far)) / (dalpha * dalpha);
  out.half_step = 8.0 * (1.0 - state_fidelity(here, near)) / (dalpha * dalpha / 4.0);
  out.extrapolated = 2.0 * out.half_step - out.value;
  const double scale = std::max({std::abs(out.value), std::abs(out.half_step), 1e-12});
  out.consistent = std::abs(out.value - out.half_step) <= 1e-2 * scale;
  return out;
}

double qfi_spectral(const Matrix& rho, const Matrix& drho) {
  const EigenSystem sys = herm_eig(hermitian_part(rho));
  const Matrix d = sys.vectors.adjoint() * drho * sys.vectors;
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double s = sys.values(i) + sys.values(j);
      if (s > kVanishing) total += std::norm(d(i, j)) / s;
    }
  }
  return 2.0 * total;
}

double qfi_pure(const Vector& psi, const Vector& dpsi) {
  if (psi.size() != dpsi.size()) throw std::invalid_argument("qfi_pure: length mismatch");
  return 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
}

Matrix sld(const Matrix& rho, const Matrix& drho) { return solve_lyapunov(rho, 2.0 * drho); }

Matrix density_derivative(const StateFamily& family, double alpha, double step) {
  require_interior(family, alpha, step);
  return hermitian_part((family.at(alpha + step).density() - family.at(alpha - step).density()) /
                        (2.0 * step));
}

Vector state_derivative(const StateFamily& family, double alpha, double step) {
  require_interior(family, alpha, step);
  const LabeledState centre = family.at(alpha);
  if (!centre.is_pure()) throw std::invalid_argument("state_derivative: family is not pure");
  const Vector& psi = centre.psi();
  auto aligned = [&](double a) {
    const LabeledState s = family.at(a);
    if (!s.is_pure()) throw std::invalid_argument("state_derivative: family is not pure");
    Vector v = s.psi().normalized();
    const Complex overlap = psi.dot(v);
    if (std::abs(overlap) > 0.0) v *= std::conj(overlap) / std::abs(overlap);
    return v;
  };
  return (aligned(alpha + step) - aligned(alpha - step)) / (2.0 * step);
}

double qfi(const StateFamily& family, double alpha) {
  const LabeledState centre = family.at(alpha);
  if (centre.is_pure()) return qfi_pure(centre.psi(), state_derivative(family, alpha));
  return qfi_spectral(centre.rho(), density_derivative(family, alpha));
}

bool FisherReport::chain_holds() const {
  if (std::isnan(inv_cfi) || std::isnan(inv_qfi)) return false;
  if (inv_cfi < inv_qfi - slack(inv_qfi)) return false;
  if (std::isnan(adjusted_variance)) return true;
  return adjusted_variance >= inv_cfi - slack(inv_cfi);
}

FisherReport chain_report(const Readout& readout, const RealVector& lambdas,
                          const StateFamily& family, double alpha) {
  const double h = kProbabilityStep;
  require_interior(family, alpha, std::max(h, kStateStep));
  const RealVector p = readout(family.at(alpha));
  const RealVector p_minus = readout(family.at(alpha - h));
  const RealVector p_plus = readout(family.at(alpha + h));

  FisherReport r;
  r.alpha = alpha;
  r.expectation = expectation_from(p, lambdas);
  r.variance = variance_from(p, lambdas);
  // Σ ∂p = 0, so centring λ on the mean is exact and keeps a common offset in
  // λ from amplifying the rounding of the differenced probabilities.
  const RealVector centred = (lambdas.array() - r.expectation).matrix();
  r.derivative = centred.dot(p_plus - p_minus) / (2.0 * h);
  if (std::abs(r.derivative) < kFlatDerivative) {
    r.adjusted_variance = std::numeric_limits<double>::quiet_NaN();
    r.diagnostics.emplace_back("flat");
  } else {
    r.adjusted_variance = r.variance / (r.derivative * r.derivative);
  }
  try {
    const double ic = cfi_from_probabilities(p_minus, p, p_plus, h);
    r.inv_cfi = ic > 0.0 ? 1.0 / ic : std::numeric_limits<double>::infinity();
  } catch (const FisherDivergence&) {
    r.inv_cfi = 0.0;
    r.diagnostics.emplace_back("cfi_divergent");
  }
  const double iq = qfi(family, alpha);
  r.inv_qfi = iq > 0.0 ? 1.0 / iq : std::numeric_limits<double>::infinity();
  if (!r.chain_holds()) r.diagnostics.emplace_back("chain");
  return r;
}

std::vector<FisherReport> bound_chain(const ParamObservable& obs, const RealVector& theta,
                                      const StateFamily& family, const RealVector& alphas) {
  const Readout readout = [&](const LabeledState& s) { return probabilities(obs, theta, s); };
  std::vector<FisherReport> out;
  out.reserve(static_cast<std::size_t>(alphas.size()));
  for (double a : alphas) out.push_back(chain_report(readout, obs.lambdas, family, a));
  return out;
}

std::vector<FisherReport> bound_chain(const SpectralObservable& obs, const StateFamily& family,
                                      const RealVector& alphas) {
  const Readout readout = [&](const LabeledState& s) { return probabilities(obs, s); };
  std::vector<FisherReport> out;
  out.reserve(static_cast<std::size_t>(alphas.size()));
  for (double a : alphas) out.push_back(chain_report(readout, obs.lambdas, family, a));
  return out;
}

}  // namespace qvar
