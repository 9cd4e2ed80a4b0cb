#include "qvar/bfgs.hpp"

#include <cmath>
#include <stdexcept>

namespace qvar {

BfgsResult minimize_bfgs(const ValueAndGradient& fg, RealVector x0, const BfgsOptions& options) {
  const Eigen::Index dim = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  RealVector g(dim);
  res.value = fg(res.x, g);
  if (!std::isfinite(res.value)) throw std::domain_error("minimize_bfgs: non-finite objective at start");
  res.history.push_back(res.value);

  RealMatrix h = RealMatrix::Identity(dim, dim);
  bool scaled = false;
  RealVector x_new(dim);
  RealVector g_new(dim);

  while (res.iterations < options.max_iters) {
    if (g.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      res.converged = true;
      break;
    }
    RealVector d = -(h * g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      h.setIdentity();
      d = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < options.max_backtracks; ++k) {
      x_new = res.x + step * d;
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= options.shrink;
    }
    if (!accepted) {
      if (h.isIdentity()) {
        res.stalled = true;
        break;
      }
      h.setIdentity();  // retry along steepest descent
      continue;
    }

    const RealVector s = x_new - res.x;
    const RealVector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RealVector hy = h * y;
      // H+ = (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ, expanded.
      h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
           rho * (hy * s.transpose() + s * hy.transpose());
    }
    res.x = x_new;
    g = g_new;
    res.value = f_new;
    res.history.push_back(f_new);
    ++res.iterations;
  }
  if (!res.converged && g.lpNorm<Eigen::Infinity>() < options.grad_tol) res.converged = true;
  return res;
}

}  // namespace qvar
