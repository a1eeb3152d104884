#include "gppl/kernel.hpp"

#include <algorithm>

namespace gppl {

namespace {

void check_finite(const Matrix& x, const char* what) {
  if (!x.allFinite()) {
    throw InvalidArgument(std::string(what) + ": input has non-finite entries");
  }
}

// s1 * exp(-d2 / (2 l^2)) over all row pairs of a and b.
Matrix se_block(const Matrix& a, const Matrix& b, const Hyperparams& hp) {
  const double s1 = hp.sigma1_sq();
  const double inv_two_l2 = 0.5 / (hp.ell() * hp.ell());
  Matrix out(a.rows(), b.rows());
  for (long j = 0; j < b.rows(); ++j) {
    for (long i = 0; i < a.rows(); ++i) {
      long double d2 = 0.0L;
      for (long k = 0; k < a.cols(); ++k) {
        const long double d = static_cast<long double>(a(i, k)) - b(j, k);
        d2 += d * d;
      }
      out(i, j) = s1 * std::exp(-std::max(0.0, static_cast<double>(d2)) *
                                inv_two_l2);
    }
  }
  return out;
}

}  // namespace

void Hyperparams::validate() const {
  if (!(sigma2_sq > 0.0) || !std::isfinite(sigma2_sq)) {
    throw InvalidArgument("Hyperparams: sigma2_sq must be positive");
  }
  if (!std::isfinite(sigma1_sq()) || !std::isfinite(ell()) || ell() <= 0.0) {
    throw InvalidArgument("Hyperparams: log-hyperparameters out of range");
  }
}

Matrix gram_train(const Matrix& x, const Hyperparams& hp) {
  hp.validate();
  if (x.rows() < 1) throw InvalidArgument("gram_train: need at least one row");
  check_finite(x, "gram_train");
  Matrix k = se_block(x, x, hp);
  k = 0.5 * (k + k.transpose());
  k.diagonal().array() += hp.sigma2_sq;
  return k;
}

Matrix gram_cross(const Matrix& x, const Matrix& x_star, const Hyperparams& hp) {
  hp.validate();
  if (x.cols() != x_star.cols()) {
    throw InvalidArgument("gram_cross: column counts differ");
  }
  check_finite(x, "gram_cross");
  check_finite(x_star, "gram_cross");
  return se_block(x, x_star, hp);
}

Matrix gram_test(const Matrix& x_star, const Hyperparams& hp) {
  hp.validate();
  check_finite(x_star, "gram_test");
  Matrix k = se_block(x_star, x_star, hp);
  k = 0.5 * (k + k.transpose());
  if (hp.jitter_on_test) k.diagonal().array() += hp.sigma2_sq;
  return k;
}

Vector gram_test_diag(const Matrix& x_star, const Hyperparams& hp) {
  hp.validate();
  check_finite(x_star, "gram_test_diag");
  return Vector::Constant(x_star.rows(),
                          hp.sigma1_sq() + (hp.jitter_on_test ? hp.sigma2_sq : 0.0));
}

}  // namespace gppl
