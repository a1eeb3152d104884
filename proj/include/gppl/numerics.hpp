#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "gppl/errors.hpp"

namespace gppl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Gauss-Hermite rule normalised for expectations against N(0, 1):
/// E[g(X)] ~= sum_k weights[k] * g(nodes[k]). Nodes are sorted ascending.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
/// polynomials. Exact for polynomials of degree <= 2*order-1.
QuadratureRule gauss_hermite_rule(int order);

/// E[g(F)] for F ~ N(mean, variance) under `rule`.
template <class G>
double expect_1d(G&& g, double mean, double variance,
                 const QuadratureRule& rule) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidArgument("expect_1d: variance must be positive and finite");
  }
  const double sd = std::sqrt(variance);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double v = g(mean + sd * rule.nodes[k]);
    if (!std::isfinite(v)) {
      throw NumericFailure("expect_1d: integrand is not finite at f=" +
                           std::to_string(mean + sd * rule.nodes[k]));
    }
    acc += rule.weights[k] * v;
  }
  return acc;
}

/// Cholesky factorisation of a symmetric positive-definite matrix.
///
/// A pivot below 1e-12 * max|diag| is treated as failure and reported
/// through NotPositiveDefinite with the index of the offending minor.
/// Only the lower triangle of the input is read.
class PdFactor {
 public:
  explicit PdFactor(const Matrix& m);

  long size() const { return llt_.rows(); }
  Matrix solve(const Matrix& b) const { return llt_.solve(b); }
  Vector solve(const Vector& b) const { return llt_.solve(b); }
  /// L^{-1} b.
  Matrix solve_lower(const Matrix& b) const {
    return llt_.matrixL().solve(b);
  }
  double log_det() const;
  Matrix lower() const { return llt_.matrixL(); }

 private:
  Eigen::LLT<Matrix> llt_;
};

struct FactorSolve {
  Matrix solution;
  double log_det = 0.0;
};

/// M^{-1} B via PdFactor; the log-determinant comes along for free.
FactorSolve psd_factor_solve(const Matrix& m, const Matrix& b);

/// Throws NotPositiveDefinite unless `m` factorises.
void require_positive_definite(const Matrix& m, const std::string& what);
bool is_positive_definite(const Matrix& m);

// Standard normal helpers. All are accurate in both tails.
double normal_pdf(double z);
double normal_cdf(double z);
double log_normal_cdf(double z);
/// phi(z) / Phi(z) without overflow for very negative z.
double normal_hazard(double z);
double log_normal_pdf(double x, double mean, double variance);

}  // namespace gppl
