#pragma once

#include <array>
#include <vector>

#include "gppl/inference.hpp"

namespace gppl {

struct GridOptions {
  int resolution = 400;      // cells per axis
  double half_width = 6.0;   // in prior standard deviations
  // Sites whose likelihood enters the posterior. Unobserved axes keep only
  // the prior, which gives 1-D checks on a 2-D grid.
  std::array<bool, 2> observed{true, true};
};

struct GridMode {
  Vector location;
  double density = 0.0;
};

/// Brute-force posterior of a 2-D latent vector on a regular grid. Values
/// are cell-centred, normalised by log-sum-exp, moments by Riemann sums.
class GridOracle2D {
 public:
  GridOracle2D(const GaussianPrior& prior, const LikelihoodModel& like,
               const Vector& y, const GridOptions& opts = {});

  int resolution() const { return res_; }
  double x(int i) const { return lo_[0] + (i + 0.5) * step_[0]; }
  double y(int j) const { return lo_[1] + (j + 0.5) * step_[1]; }
  double cell_area() const { return step_[0] * step_[1]; }
  /// Normalised posterior density at cell (i, j).
  double density(int i, int j) const { return density_(i, j); }
  const Matrix& densities() const { return density_; }

  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  double log_evidence() const { return log_evidence_; }
  /// Grid-local maxima, highest density first.
  const std::vector<GridMode>& modes() const { return modes_; }

 private:
  int res_;
  std::array<double, 2> lo_{}, step_{};
  Matrix density_;
  Vector mean_;
  Matrix cov_;
  double log_evidence_ = 0.0;
  std::vector<GridMode> modes_;
};

}  // namespace gppl
