#pragma once

// Quasi-Newton minimization with inverse-Hessian secant updates and an
// Armijo backtracking line search.

#include <functional>
#include <vector>

#include "qvar/linalg.hpp"

namespace qvar {

/// Returns f(x) and writes ∇f(x) into the second argument.
using ValueAndGradient = std::function<double(const RealVector&, RealVector&)>;

struct BfgsOptions {
  int max_iters = 500;
  double grad_tol = 1e-7;  // max-norm of the gradient
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 50;
};

struct BfgsResult {
  RealVector x;
  double value = 0.0;
  std::vector<double> history;  // objective after every accepted step, starting point first
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  // line search could not decrease the objective
};

BfgsResult minimize_bfgs(const ValueAndGradient& fg, RealVector x0, const BfgsOptions& options = {});

}  // namespace qvar
