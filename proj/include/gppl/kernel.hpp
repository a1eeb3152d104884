#pragma once

#include "gppl/numerics.hpp"

namespace gppl {

// Squared-exponential covariance plus index-diagonal jitter:
//   k(x_i, x_j) = s1 * exp(-|x_i - x_j|^2 / (2 l^2)) + s2 * [i == j]
// with s1 = exp(log_sigma1_sq), l = exp(log_ell), s2 = sigma2_sq (fixed).
struct Hyperparams {
  double log_sigma1_sq = std::log(10.0);
  double log_ell = 0.0;
  double sigma2_sq = 0.1;
  // Whether gram_test puts sigma2_sq on its diagonal.
  bool jitter_on_test = true;

  double sigma1_sq() const { return std::exp(log_sigma1_sq); }
  double ell() const { return std::exp(log_ell); }
  void validate() const;
};

/// n x n training Gram matrix, jitter on the diagonal.
Matrix gram_train(const Matrix& x, const Hyperparams& hp);
/// n x m cross-covariance between training and test rows; never jittered.
Matrix gram_cross(const Matrix& x, const Matrix& x_star, const Hyperparams& hp);
/// m x m test Gram matrix; jittered iff hp.jitter_on_test.
Matrix gram_test(const Matrix& x_star, const Hyperparams& hp);
/// Diagonal of gram_test without forming the matrix.
Vector gram_test_diag(const Matrix& x_star, const Hyperparams& hp);

}  // namespace gppl
