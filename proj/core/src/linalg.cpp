#include "qvar/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qvar {

int qubit_count(Eigen::Index dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

Matrix partial_trace(const Matrix& a, int n, std::span<const int> discard) {
  if (a.rows() != a.cols() || a.rows() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("partial_trace: operator is not 2^n x 2^n");
  }
  std::uint64_t discard_mask = 0;
  for (int q : discard) {
    if (q < 0 || q >= n) {
      throw std::out_of_range("partial_trace: qubit index " + std::to_string(q) + " out of range");
    }
    discard_mask |= std::uint64_t{1} << (n - 1 - q);
  }
  const int kept = n - std::popcount(discard_mask);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  const std::uint64_t keep_mask = full & ~discard_mask;

  // Compress the kept bits of an index into a contiguous index, preserving order.
  auto compress = [&](std::uint64_t idx) {
    std::uint64_t out = 0;
    int pos = 0;
    for (int bit = 0; bit < n; ++bit) {
      if (keep_mask >> bit & 1U) {
        out |= (idx >> bit & 1U) << pos;
        ++pos;
      }
    }
    return out;
  };

  Matrix out = Matrix::Zero(Eigen::Index{1} << kept, Eigen::Index{1} << kept);
  const auto dim = static_cast<std::uint64_t>(a.rows());
  for (std::uint64_t r = 0; r < dim; ++r) {
    for (std::uint64_t c = 0; c < dim; ++c) {
      if ((r & discard_mask) != (c & discard_mask)) continue;
      out(static_cast<Eigen::Index>(compress(r)), static_cast<Eigen::Index>(compress(c))) +=
          a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& a, double tol) {
  return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

EigenSystem herm_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("herm_eig: matrix is not square");
  // Relative tolerance so large Hamiltonians with O(1e2) entries still pass.
  const double scale = std::max(1.0, max_abs(a));
  if (!is_hermitian(a, kHermitianTol * scale)) {
    throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  }
  EigenSystem sys;
  if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
    // Real symmetric input (the lattice Hamiltonians): the real solver is several times faster.
    const Eigen::MatrixXd re = 0.5 * (a.real() + a.real().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(re);
    if (solver.info() != Eigen::Success) throw std::runtime_error("herm_eig: solver failed");
    sys = {solver.eigenvalues(), solver.eigenvectors().cast<Complex>()};
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success) throw std::runtime_error("herm_eig: solver failed");
    sys = {solver.eigenvalues(), solver.eigenvectors()};
  }
  for (Eigen::Index c = 0; c < sys.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < sys.vectors.rows(); ++r) {
      const Complex z = sys.vectors(r, c);
      if (std::abs(z) > 1e-10) {
        sys.vectors.col(c) *= std::conj(z) / std::abs(z);
        sys.vectors(r, c) = std::abs(z);
        break;
      }
    }
  }
  return sys;
}

Matrix herm_fn_complex(const Matrix& a, const std::function<Complex(double)>& f) {
  const EigenSystem sys = herm_eig(a);
  Vector fv(sys.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv(i) = f(sys.values(i));
    if (!std::isfinite(fv(i).real()) || !std::isfinite(fv(i).imag())) {
      throw std::domain_error("herm_fn: function undefined at eigenvalue " +
                              std::to_string(sys.values(i)));
    }
  }
  return sys.vectors * fv.asDiagonal() * sys.vectors.adjoint();
}

Matrix herm_fn(const Matrix& a, const std::function<double(double)>& f) {
  return herm_fn_complex(a, [&](double t) { return Complex{f(t), 0.0}; });
}

Matrix psd_sqrt(const Matrix& a) {
  return herm_fn(a, [](double t) {
    if (t < -1e-12) return std::nan("");
    return std::sqrt(std::max(t, 0.0));
  });
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  const EigenSystem sys = herm_eig(a);
  if (sys.values(0) <= 1e-12) {
    throw std::domain_error("solve_lyapunov: A is not strictly positive (min eigenvalue " +
                            std::to_string(sys.values(0)) + ")");
  }
  Matrix bt = sys.vectors.adjoint() * b * sys.vectors;
  for (Eigen::Index i = 0; i < bt.rows(); ++i) {
    for (Eigen::Index j = 0; j < bt.cols(); ++j) {
      bt(i, j) /= sys.values(i) + sys.values(j);
    }
  }
  return hermitian_part(sys.vectors * bt * sys.vectors.adjoint());
}

Matrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex{re, im};
    }
  }
  return g;
}

Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

Matrix random_hermitian(Eigen::Index dim, Rng& rng) {
  return hermitian_part(random_gaussian_matrix(dim, dim, rng));
}

Vector random_unit_vector(Eigen::Index dim, Rng& rng) {
  Vector v = random_gaussian_matrix(dim, 1, rng).col(0);
  return v / v.norm();
}

Matrix random_density(Eigen::Index dim, Rng& rng) {
  const Matrix w = random_gaussian_matrix(dim, dim, rng);
  Matrix rho = w * w.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

}  // namespace qvar
