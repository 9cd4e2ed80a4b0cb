#include "qvar/states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qvar {

LabeledState::LabeledState(Vector psi, double label) : state_(std::move(psi)), label_(label) {
  if (std::abs(std::get<Vector>(state_).norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("LabeledState: state vector is not normalized");
  }
}

LabeledState::LabeledState(Matrix rho, double label) : state_(std::move(rho)), label_(label) {
  check_density(std::get<Matrix>(state_));
}

Matrix LabeledState::density() const { return is_pure() ? projector(psi()) : rho(); }

Eigen::Index LabeledState::dim() const { return is_pure() ? psi().size() : rho().rows(); }

void check_density(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix is not square");
  if (!is_hermitian(rho, 1e-10)) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  const double min_eig = herm_eig(rho).values(0);
  if (min_eig < -1e-10) {
    throw std::invalid_argument("density matrix has negative eigenvalue " +
                                std::to_string(min_eig));
  }
}

Vector basis_state(int n, std::uint64_t index) {
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

Matrix mixture_state(double alpha, const Matrix& rho1, const Matrix& rho2) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("mixture_state: alpha must lie in [0, 1]");
  }
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols()) {
    throw std::invalid_argument("mixture_state: dimension mismatch");
  }
  return alpha * rho1 + (1.0 - alpha) * rho2;
}

Matrix rank2_state(double r, const Vector& v1, const Vector& v2) {
  if (std::abs(v1.dot(v2)) > 1e-10) {
    throw std::invalid_argument("rank2_state: vectors are not orthogonal");
  }
  return r * projector(v1) + (1.0 - r) * projector(v2);
}

Vector ghz(int n, int sign) {
  if (n < 1) throw std::invalid_argument("ghz: n must be >= 1");
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  const double amp = 1.0 / std::sqrt(2.0);
  v(0) = amp;
  v(v.size() - 1) += sign >= 0 ? amp : -amp;
  return v;
}

double fidelity(const Matrix& rho, const Matrix& tau) {
  if (rho.rows() != tau.rows()) throw std::invalid_argument("fidelity: dimension mismatch");
  const EigenSystem a = herm_eig(hermitian_part(rho));
  const EigenSystem b = herm_eig(hermitian_part(tau));
  if (a.values(0) < -1e-10 || b.values(0) < -1e-10) {
    throw std::domain_error("fidelity: negative eigenvalue beyond tolerance");
  }
  // F is symmetric, so take the square root on the lower-rank side and work
  // inside its support. Rounding-level eigenvalues would otherwise turn into
  // O(1e-8) contributions under the square root.
  auto support = [](const EigenSystem& e) { return (e.values.array() > 1e-12).count(); };
  const bool swap = support(b) < support(a);
  const EigenSystem& small = swap ? b : a;
  const Matrix& other = swap ? rho : tau;
  const Eigen::Index k = support(small);
  if (k == 0) return 0.0;
  const Matrix half = small.vectors.rightCols(k) *
                      small.values.tail(k).cwiseSqrt().cast<Complex>().asDiagonal();
  const Matrix inner = hermitian_part(half.adjoint() * hermitian_part(other) * half);
  const RealVector values = herm_eig(inner).values;
  double f = 0.0;
  for (double v : values) f += std::sqrt(std::max(v, 0.0));
  return std::clamp(f, 0.0, 1.0);
}

GroundState ground_state(const Matrix& hamiltonian) {
  const EigenSystem sys = herm_eig(hamiltonian);
  GroundState gs;
  gs.psi = sys.vectors.col(0);
  gs.energy = sys.values(0);
  gs.gap = sys.values.size() > 1 ? sys.values(1) - sys.values(0) : 0.0;
  gs.degenerate = sys.values.size() > 1 && gs.gap < 1e-10;
  return gs;
}

}  // namespace qvar
