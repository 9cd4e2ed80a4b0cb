#include "qvar/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace qvar::mixture {
namespace {

double pow2(int k) { return std::ldexp(1.0, k); }

double dense_variance(const Matrix& m, const Matrix& rho) {
  const double mean = (rho * m).trace().real();
  return (rho * m * m).trace().real() - mean * mean;
}

}  // namespace

MixtureModel::MixtureModel(int qubits, double weight, Vector first, Vector second)
    : n(qubits), r(weight), v1(std::move(first)), v2(std::move(second)) {
  if (n < 1) throw std::invalid_argument("MixtureModel: need at least one qubit");
  if (v1.size() != dim() || v2.size() != dim()) {
    throw std::invalid_argument("MixtureModel: vectors must have dimension 2^n");
  }
  rank2_state(r, v1, v2);  // validates r and orthonormality
}

MixtureModel MixtureModel::ghz(int qubits, double weight) {
  return {qubits, weight, qvar::ghz(qubits, +1), qvar::ghz(qubits, -1)};
}

Matrix MixtureModel::rho1() const { return rank2_state(r, v1, v2); }
Matrix MixtureModel::rho2() const { return identity(dim()) / static_cast<double>(dim()); }
Matrix MixtureModel::rho(double alpha) const { return mixture_state(alpha, rho1(), rho2()); }

StateFamily MixtureModel::family() const {
  const Matrix a = rho1();
  const Matrix b = rho2();
  return {[a, b](double alpha) { return LabeledState(mixture_state(alpha, a, b), alpha); }, 0.0, 1.0};
}

Matrix MixtureModel::eigenbasis() const {
  const Matrix complement = identity(dim()) - projector(v1) - projector(v2);
  const EigenSystem sys = herm_eig(hermitian_part(complement));
  Matrix basis(dim(), dim());
  basis.col(0) = r >= 0.5 ? v1 : v2;
  basis.col(1) = r >= 0.5 ? v2 : v1;
  // Complement eigenvalues ascend: two zeros, then ones.
  basis.rightCols(dim() - 2) = sys.vectors.rightCols(dim() - 2);
  return basis;
}

double qfi_half_closed(int n, double r) {
  const double d = pow2(n);
  return 4.0 - 8.0 * (r - 1.0) / (d * (r - 1.0) - 1.0) - 8.0 * r / (d * r + 1.0);
}

double qfi_printed(double alpha, int n, double r) {
  const double d = pow2(n);
  const double big_d = 1.0 - d * (1.0 + r);
  const double big_e = 1.0 - d * r;
  return (alpha * big_d * big_e - 2.0 * r * (1.0 - big_d) + d - 1.0) /
         ((1.0 - alpha) * (1.0 - alpha * big_d) * (1.0 - alpha * big_e));
}

double qfi_commuting(double alpha, int n, double r) {
  const double u = 1.0 / pow2(n);
  const double rest = (1.0 - alpha) * u;
  const double l1 = alpha * r + rest;
  const double l2 = alpha * (1.0 - r) + rest;
  double total = 0.0;
  auto add = [&](double lambda, double dl, double multiplicity) {
    if (lambda > 1e-15) total += multiplicity * dl * dl / lambda;
  };
  add(l1, r - u, 1.0);
  add(l2, (1.0 - r) - u, 1.0);
  add(rest, -u, pow2(n) - 2.0);
  return total;
}

PrintedQfiCheck check_printed_qfi(double alpha, int n, double r) {
  PrintedQfiCheck c;
  c.printed = qfi_printed(alpha, n, r);
  c.oracle = qfi_commuting(alpha, n, r);
  c.agrees = std::abs(c.printed - c.oracle) <= 1e-8 * std::max(1.0, std::abs(c.oracle));
  return c;
}

RealVector optimal_eigenvalues_full(int n, double r) {
  const double u = 1.0 / pow2(n);
  const double scale = 2.0 / qfi_half_closed(n, r);
  RealVector out = RealVector::Constant(static_cast<Eigen::Index>(pow2(n)), 0.5 - scale);
  out(0) = 0.5 + scale * (r - u) / (r + u);
  out(1) = 0.5 + scale * ((1.0 - r) - u) / ((1.0 - r) + u);
  return out;
}

RealVector optimal_eigenvalues_partial(int n, int m) {
  if (m < 1 || m >= n) throw std::invalid_argument("optimal_eigenvalues_partial: need 1 <= m < n");
  RealVector out = RealVector::Constant(static_cast<Eigen::Index>(pow2(m)), 1.0 / (1.0 - pow2(m)));
  out(0) = 1.0;
  return out;
}

double variance_full(double alpha, int n, double r) {
  const double d = pow2(n);
  const double a = (1.0 - 2.0 * r) * (1.0 - 2.0 * r);
  const double b = 1.0 - d + d * (d - 4.0) * (r - 1.0) * r;
  const double c = r * (r - 1.0);
  return (1.0 - alpha) * alpha + (2.0 * alpha - 1.0) * (1.0 - d * a) * a / (b * b) +
         (2.0 * (2.0 + d) * c - alpha * (1.0 + 2.0 * (4.0 + d) * c)) / b;
}

double variance_partial(double alpha, int m) {
  return (1.0 - alpha) * (1.0 / (pow2(m) - 1.0) + alpha);
}

double cfi_optimal_partial(int m) { return 4.0 * (pow2(m) - 1.0) / (pow2(m) + 1.0); }

TotalVariance total_variance_partial(int m) {
  if (m < 1) throw std::invalid_argument("total_variance_partial: m must be >= 1");
  return {1.0 / cfi_optimal_partial(m) - 1.0 / 12.0, 1.0 / (2.0 * (pow2(m) - 1.0)) + 1.0 / 6.0};
}

SpectralObservable optimal_observable_matrix(const MixtureModel& model, std::optional<int> measured) {
  SpectralObservable out;
  if (!measured || *measured >= model.n) {
    const RealVector lambdas = optimal_eigenvalues_full(model.n, model.r);
    const Matrix p1 = projector(model.v1);
    const Matrix p2 = projector(model.v2);
    out.lambdas = Eigen::Vector3d(lambdas(0), lambdas(1), lambdas(2));
    out.projectors = {p1, p2, identity(model.dim()) - p1 - p2};
    if (model.n == 1) {
      out.lambdas.conservativeResize(2);
      out.projectors.pop_back();
    }
    return out;
  }
  const int m = *measured;
  out.lambdas = optimal_eigenvalues_partial(model.n, m);
  const Matrix basis = model.eigenbasis();
  const auto block = static_cast<Eigen::Index>(pow2(model.n - m));
  for (Eigen::Index k = 0; k < out.lambdas.size(); ++k) {
    const auto cols = basis.middleCols(k * block, block);
    out.projectors.push_back(cols * cols.adjoint());
  }
  return out;
}

double lyapunov_residual(const MixtureModel& model, const Matrix& observable) {
  const Matrix half = model.rho(0.5);
  const Matrix rhs = half + (2.0 / qfi_half_closed(model.n, model.r)) * (model.rho1() - model.rho2());
  return max_abs(half * observable + observable * half - rhs);
}

double f_divergence(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size()) throw std::invalid_argument("f_divergence: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(q(i) > 0.0)) throw std::domain_error("f_divergence: q must be strictly positive");
    const double x = p(i) / q(i);
    total += q(i) * (x - 1.0) * (x - 1.0) / (x + 1.0);
  }
  return total;
}

bool check_majorization(const RealVector& p_prime, const RealVector& p) {
  if (p_prime.size() != p.size()) throw std::invalid_argument("check_majorization: length mismatch");
  std::vector<double> a(p_prime.begin(), p_prime.end());
  std::vector<double> b(p.begin(), p.end());
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  double sa = 0.0;
  double sb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    if (sa > sb + 1e-10) return false;
  }
  return std::abs(sa - sb) <= 1e-10;
}

OptimalityReport projector_optimality_oracle(const MixtureModel& model, int m, int trials,
                                             std::uint64_t seed) {
  const SpectralObservable best = optimal_observable_matrix(model, m);
  const Matrix rho1 = model.rho1();
  const RealVector spectrum = herm_eig(rho1).values;
  const RealVector q = RealVector::Constant(best.lambdas.size(), 1.0 / pow2(m));
  auto distribution = [&](const std::vector<Matrix>& projectors) {
    RealVector p(static_cast<Eigen::Index>(projectors.size()));
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      p(static_cast<Eigen::Index>(i)) = (projectors[i] * rho1).trace().real();
    }
    return p;
  };

  OptimalityReport report;
  report.trials = trials;
  const RealVector p_opt = distribution(best.projectors);
  report.optimal = f_divergence(p_opt, q);
  report.best_found = trials > 0 ? -1.0 : report.optimal;
  Rng rng(seed);
  const Matrix basis = model.eigenbasis();
  std::uniform_real_distribution<double> decade(-4.0, 0.0);
  for (int t = 0; t < trials; ++t) {
    // Alternate Haar rotations with small kicks around the optimum, where an
    // exceedance would show up first.
    Matrix w;
    if (t % 2 == 0) {
      w = random_unitary(model.dim(), rng);
    } else {
      const double eps = std::pow(10.0, decade(rng));
      w = herm_fn_complex(random_hermitian(model.dim(), rng),
                          [eps](double x) { return std::exp(Complex(0.0, -eps * x)); });
    }
    std::vector<Matrix> rotated;
    rotated.reserve(best.projectors.size());
    for (const auto& proj : best.projectors) rotated.push_back(w * proj * w.adjoint());
    const RealVector p = distribution(rotated);
    const double value = f_divergence(p, q);
    report.best_found = std::max(report.best_found, value);
    if (value > report.optimal + 1e-10) ++report.exceedances;
    // Diagonal of ρ1 in the rotated basis is majorized by its spectrum, and
    // the coarse-grained distribution by the optimal one.
    const Matrix frame = w * basis;
    const RealVector diag = (frame.adjoint() * rho1 * frame).diagonal().real();
    if (!check_majorization(diag, spectrum) || !check_majorization(p, p_opt)) {
      ++report.majorization_failures;
    }
  }
  return report;
}

SelfTestReport self_test() {
  SelfTestReport report;
  auto fail = [&](const std::string& what, int n, double r, double got, double want) {
    std::ostringstream msg;
    msg << what << " (n=" << n << ", r=" << r << "): got " << got << ", expected " << want;
    report.failures.push_back(msg.str());
  };
  auto close = [](double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
  };
  for (int n : {2, 3}) {
    for (double r : {0.0, 0.25, 0.5, 0.8}) {
      const MixtureModel model = MixtureModel::ghz(n, r);
      const Matrix drho = model.rho1() - model.rho2();
      const double spectral = qfi_spectral(model.rho(0.5), drho);
      if (!close(qfi_half_closed(n, r), spectral, 1e-8)) {
        fail("qfi_half_closed", n, r, qfi_half_closed(n, r), spectral);
      }
      if (!close(qfi_commuting(0.3, n, r), qfi_spectral(model.rho(0.3), drho), 1e-8)) {
        fail("qfi_commuting", n, r, qfi_commuting(0.3, n, r), qfi_spectral(model.rho(0.3), drho));
      }
      const Matrix full = optimal_observable_matrix(model).dense();
      if (lyapunov_residual(model, full) > 1e-9) {
        fail("lyapunov residual", n, r, lyapunov_residual(model, full), 0.0);
      }
      for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Matrix rho = model.rho(alpha);
        const double dense = dense_variance(full, rho);
        if (!close(variance_full(alpha, n, r), dense, 1e-10)) {
          fail("variance_full", n, r, variance_full(alpha, n, r), dense);
        }
        for (int m = 1; m < n; ++m) {
          const double part = dense_variance(optimal_observable_matrix(model, m).dense(), rho);
          if (!close(variance_partial(alpha, m), part, 1e-10)) {
            fail("variance_partial m=" + std::to_string(m), n, r, variance_partial(alpha, m), part);
          }
        }
      }
    }
  }
  return report;
}

}  // namespace qvar::mixture
