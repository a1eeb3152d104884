#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gppl/grid_oracle.hpp"
#include "gppl/inference.hpp"

namespace gppl {

/// The two-point instance on which EP breaks down: prior mean (-0.5, -3),
/// unit variances, correlation 0.8, noisy threshold with epsilon 0.01,
/// both labels +1.
struct DemoProblem {
  GaussianPrior prior;
  LikelihoodModel like;
  Vector y;

  static DemoProblem standard();
};

struct EpVariantResult {
  std::string name;  // sep_12, sep_21, pep
  InferenceReport report;
  // First negative cavity seen on each site, if any.
  std::vector<std::optional<EpEvent>> first_negative_cavity;
  // First negative cavity on any site.
  std::optional<EpEvent> first_any() const;
};

struct DemoResult {
  DemoProblem problem;
  std::vector<EpVariantResult> ep;
  InferenceReport ppl;
  InferenceReport spl;
  Vector grid_mean;
  Matrix grid_cov;
  double grid_log_evidence = 0.0;
  std::vector<GridMode> grid_modes;
  double seconds_ep = 0.0;
  double seconds_total = 0.0;
};

struct DemoOptions {
  int ep_sweeps = 10;
  int pl_max_iters = 200;
  double pl_tol = 1e-12;
  GridOptions grid;
  int ellipse_points = 200;
};

/// Runs sequential EP in both site orders and parallel EP (no clamping,
/// stopping at the first negative cavity), parallel and sequential PL, and
/// the grid oracle. When out_dir is non-empty writes contour.csv,
/// pl_iterates.csv, pl_ellipse.csv and ep_diagnostics.csv there.
DemoResult run_synthetic_demo(const std::string& out_dir,
                              const DemoOptions& opts = {});

}  // namespace gppl
