#include "gppl/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gppl {

GridOracle2D::GridOracle2D(const GaussianPrior& prior,
                           const LikelihoodModel& like, const Vector& y,
                           const GridOptions& opts)
    : res_(opts.resolution) {
  if (prior.size() != 2) throw InvalidArgument("grid oracle: prior must be 2-D");
  if (y.size() != 2) throw InvalidArgument("grid oracle: need two labels");
  if (res_ < 100) throw InvalidArgument("grid oracle: resolution below 100");
  if (!(opts.half_width >= 6.0)) {
    throw InvalidArgument("grid oracle: bounds must span 6 prior sd");
  }
  // The grid only evaluates log p(y|f), so the flat noisy threshold
  // (epsilon = 0.5) is allowed here even though inference rejects it.
  if (!(like.kind == LikelihoodKind::noisy_threshold && like.epsilon == 0.5)) {
    like.validate();
  }
  const PdFactor factor(prior.cov);
  const Matrix& lower = factor.lower();
  for (int a = 0; a < 2; ++a) {
    const double sd = std::sqrt(prior.cov(a, a));
    lo_[a] = prior.mean(a) - opts.half_width * sd;
    step_[a] = 2.0 * opts.half_width * sd / res_;
  }

  const double log_norm =
      -std::log(2.0 * std::numbers::pi) - 0.5 * factor.log_det();
  Matrix logp(res_, res_);
  std::vector<double> ll0(res_), ll1(res_);
  for (int i = 0; i < res_; ++i) {
    ll0[i] = opts.observed[0] ? log_likelihood(like, y(0), x(i)) : 0.0;
    ll1[i] = opts.observed[1] ? log_likelihood(like, y(1), this->y(i)) : 0.0;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < res_; ++i) {
    for (int j = 0; j < res_; ++j) {
      const double d0 = x(i) - prior.mean(0);
      const double d1 = this->y(j) - prior.mean(1);
      // Whitened residual through the 2x2 Cholesky factor.
      const double w0 = d0 / lower(0, 0);
      const double w1 = (d1 - lower(1, 0) * w0) / lower(1, 1);
      const double v = log_norm - 0.5 * (w0 * w0 + w1 * w1) + ll0[i] + ll1[j];
      logp(i, j) = v;
      top = std::max(top, v);
    }
  }
  if (!std::isfinite(top)) {
    throw NumericFailure("grid oracle: posterior is zero on the whole grid");
  }
  density_ = (logp.array() - top).exp().matrix();
  const double sum = density_.sum();
  log_evidence_ = top + std::log(sum) + std::log(cell_area());
  density_ /= sum * cell_area();

  mean_ = Vector::Zero(2);
  cov_ = Matrix::Zero(2, 2);
  for (int i = 0; i < res_; ++i) {
    for (int j = 0; j < res_; ++j) {
      const double w = density_(i, j) * cell_area();
      mean_(0) += w * x(i);
      mean_(1) += w * this->y(j);
    }
  }
  for (int i = 0; i < res_; ++i) {
    for (int j = 0; j < res_; ++j) {
      const double w = density_(i, j) * cell_area();
      const double d0 = x(i) - mean_(0);
      const double d1 = this->y(j) - mean_(1);
      cov_(0, 0) += w * d0 * d0;
      cov_(0, 1) += w * d0 * d1;
      cov_(1, 1) += w * d1 * d1;
    }
  }
  cov_(1, 0) = cov_(0, 1);

  // Local maxima over the 8-neighbourhood. On plateaus (flat likelihood
  // regions) only the first cell in scan order is kept.
  for (int i = 0; i < res_; ++i) {
    for (int j = 0; j < res_; ++j) {
      const double v = logp(i, j);
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (!di && !dj) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= res_ || b >= res_) continue;
          const double u = logp(a, b);
          const bool earlier = di < 0 || (di == 0 && dj < 0);
          if (u > v || (u == v && earlier)) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      Vector loc(2);
      loc << x(i), this->y(j);
      modes_.push_back({loc, density_(i, j)});
    }
  }
  std::sort(modes_.begin(), modes_.end(),
            [](const GridMode& a, const GridMode& b) {
              return a.density > b.density;
            });
}

}  // namespace gppl
