#pragma once

#include <iosfwd>
#include <string>

#include "gppl/inference.hpp"
#include "gppl/kernel.hpp"
#include "gppl/optimize.hpp"

namespace gppl {

struct FittedModel {
  Hyperparams hp;
  LikelihoodModel like;
  Engine engine = Engine::ppl;
  Matrix X_train;
  Vector y_train;
  SiteLinearization sites;
  GaussianBelief belief;
  double log_marginal = 0.0;
  // Optimiser bookkeeping.
  int objective_evals = 0;
  int failed_evals = 0;
};

struct Prediction {
  Vector latent_mean;
  Vector latent_var;
  Vector prob_positive;
  Vector expected_label;
};

/// Evidence approximation built from a PL run: the Gaussian evidence of the
/// linearised model times one 1-D correction integral per site, each taken
/// against that site's posterior marginal with `rule`.
double log_marginal_pl(const GaussianPrior& prior,
                       const SiteLinearization& sites,
                       const GaussianBelief& belief,
                       const LikelihoodModel& like, const Vector& y,
                       const QuadratureRule& rule);
double log_marginal_pl(const Matrix& k, const SiteLinearization& sites,
                       const GaussianBelief& belief,
                       const LikelihoodModel& like, const Vector& y,
                       const QuadratureRule& rule);

struct FitConfig {
  Engine engine = Engine::ppl;
  InferenceOptions inference;
  // Rule for the PL evidence correction integrals.
  int quad_order = 10;
  // false: evaluate once at `initial` and return.
  bool optimize = true;
  Hyperparams initial;
  BfgsOptions bfgs;
};

/// Runs `engine` at `hp` and returns its evidence approximation. The report
/// is written to `report_out` when given.
double engine_log_marginal(const Matrix& x, const Vector& y,
                           const LikelihoodModel& like, const Hyperparams& hp,
                           const FitConfig& config,
                           InferenceReport* report_out = nullptr);

/// Maximises the engine's evidence over (ln sigma1^2, ln ell) from
/// config.initial and returns the model at the best point evaluated.
FittedModel fit(const Matrix& x, const Vector& y, const LikelihoodModel& like,
                const FitConfig& config = {});

/// Latent predictive moments for arbitrary covariance blocks.
/// k_star is n x m (train x test), k_star_star is m x m.
GaussianBelief latent_posterior(const Matrix& k, const SiteLinearization& sites,
                                const Vector& y, const Matrix& k_star,
                                const Matrix& k_star_star);

Prediction predict(const FittedModel& model, const Matrix& x_star);

/// +1 where expected_label >= 0, else -1.
Vector predict_labels(const Prediction& pred);

// Plain-text model persistence (format version 1, see README).
void save_model(const FittedModel& model, std::ostream& out);
FittedModel load_model(std::istream& in);
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace gppl
