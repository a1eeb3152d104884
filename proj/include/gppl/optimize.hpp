#pragma once

#include <functional>

#include "gppl/numerics.hpp"

namespace gppl {

struct BfgsOptions {
  int max_iters = 50;
  double grad_tol = 1e-5;
  double fd_step = 1e-5;
  // Extra stops for noisy objectives: tiny accepted step or objective change.
  double step_tol = 1e-8;
  double f_tol = 1e-10;
  // Longest step tried along a search direction.
  double max_step = 2.0;
};

struct BfgsResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int failed_evaluations = 0;
  bool converged = false;
};

/// Quasi-Newton minimisation with central finite-difference gradients and a
/// backtracking (Armijo) line search. Objective values that are not finite
/// count as failures and are backtracked away from. Returns the best point
/// evaluated. Throws FitFailure if no evaluation succeeded.
BfgsResult minimize_bfgs(const std::function<double(const Vector&)>& objective,
                         const Vector& x0, const BfgsOptions& opts = {});

}  // namespace gppl
