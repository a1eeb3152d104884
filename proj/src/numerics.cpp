#include "gppl/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>

namespace gppl {

namespace {

constexpr double kPivotTolerance = 1e-12;

// Unblocked Cholesky, only used to locate the failing minor once the fast
// path has already rejected the matrix.
long first_failing_minor(const Matrix& m, double floor) {
  const long n = m.rows();
  Matrix l = Matrix::Zero(n, n);
  for (long j = 0; j < n; ++j) {
    double d = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > floor)) return j;
    l(j, j) = std::sqrt(d);
    for (long i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return n - 1;
}

// 1 - 1/z^2 + 3/z^4 - ... : Phi(z) ~ phi(z)/(-z) * series for z << 0.
double mills_series(double z) {
  const double r = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) * r;
    sum += term;
  }
  return sum;
}

constexpr double kAsymptoticBelow = -30.0;

}  // namespace

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 1 || order > 64) {
    throw InvalidArgument("gauss_hermite_rule: order must be in [1, 64], got " +
                          std::to_string(order));
  }
  QuadratureRule rule;
  rule.order = order;
  if (order == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  // He_{k+1} = x He_k - k He_{k-1}: Jacobi matrix has sqrt(k) off-diagonal.
  Matrix jacobi = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  if (eig.info() != Eigen::Success) {
    throw NumericFailure("gauss_hermite_rule: eigendecomposition failed");
  }
  rule.nodes.resize(order);
  rule.weights.resize(order);
  double total = 0.0;
  for (int k = 0; k < order; ++k) {
    rule.nodes[k] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
    total += rule.weights[k];
  }
  // Enforce exact symmetry and unit mass; the eigensolver leaves ~1e-15 noise.
  for (int k = 0; k < order / 2; ++k) {
    const int j = order - 1 - k;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[k]) / total;
    rule.nodes[k] = -x;
    rule.nodes[j] = x;
    rule.weights[k] = rule.weights[j] = w;
  }
  if (order % 2 == 1) {
    rule.nodes[order / 2] = 0.0;
    rule.weights[order / 2] /= total;
  }
  return rule;
}

PdFactor::PdFactor(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("PdFactor: matrix is not square");
  }
  const long n = m.rows();
  if (n == 0) {
    llt_.compute(m);
    return;
  }
  if (!m.allFinite()) {
    throw NotPositiveDefinite("PdFactor: matrix has non-finite entries", 0);
  }
  const double floor =
      kPivotTolerance * m.diagonal().cwiseAbs().maxCoeff();
  llt_.compute(m);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("PdFactor: matrix is not positive definite",
                              first_failing_minor(m, floor));
  }
  const Matrix& l = llt_.matrixLLT();
  for (long k = 0; k < n; ++k) {
    if (!(l(k, k) * l(k, k) > floor)) {
      throw NotPositiveDefinite("PdFactor: pivot below tolerance", k);
    }
  }
}

double PdFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

FactorSolve psd_factor_solve(const Matrix& m, const Matrix& b) {
  if (b.rows() != m.rows()) {
    throw InvalidArgument("psd_factor_solve: dimension mismatch");
  }
  PdFactor f(m);
  return {f.solve(b), f.log_det()};
}

void require_positive_definite(const Matrix& m, const std::string& what) {
  try {
    PdFactor f(m);
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(what + ": " + e.what(), e.minor());
  }
}

bool is_positive_definite(const Matrix& m) {
  try {
    PdFactor f(m);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double log_normal_cdf(double z) {
  if (z < kAsymptoticBelow) {
    return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) -
           std::log(-z) + std::log(mills_series(z));
  }
  if (z > 5.0) {
    return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  }
  return std::log(normal_cdf(z));
}

double normal_hazard(double z) {
  if (z < kAsymptoticBelow) {
    return -z / mills_series(z);
  }
  return normal_pdf(z) / normal_cdf(z);
}

double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

}  // namespace gppl
