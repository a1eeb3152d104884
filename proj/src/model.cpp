#include "gppl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gppl {

namespace {

void check_training_data(const Matrix& x, const Vector& y,
                         const LikelihoodModel& like) {
  if (x.rows() < 2) throw InvalidArgument("fit: need at least two rows");
  if (y.size() != x.rows()) throw InvalidArgument("fit: label count mismatch");
  if (!x.allFinite() || !y.allFinite()) {
    throw InvalidArgument("fit: non-finite data");
  }
  if (like.binary_labels()) {
    for (long i = 0; i < y.size(); ++i) {
      if (y(i) != 1.0 && y(i) != -1.0) {
        throw InvalidArgument("fit: labels must be +1 or -1");
      }
    }
  }
}

}  // namespace

double log_marginal_pl(const GaussianPrior& prior,
                       const SiteLinearization& sites,
                       const GaussianBelief& belief,
                       const LikelihoodModel& like, const Vector& y,
                       const QuadratureRule& rule) {
  const long n = prior.size();
  sites.validate();
  if (sites.size() != n || y.size() != n || belief.mean.size() != n) {
    throw InvalidArgument("log_marginal_pl: dimension mismatch");
  }
  const SiteSystem sys(prior.cov, sites);
  const Vector r = y - sites.b - sites.A.cwiseProduct(prior.mean);
  double total = -0.5 * sys.quad(r) - 0.5 * sys.log_det() -
                 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  std::vector<double> logs(rule.nodes.size());
  for (long i = 0; i < n; ++i) {
    const double var = belief.cov(i, i);
    if (!(var > 0.0)) {
      throw NumericFailure("log_marginal_pl: non-positive marginal variance");
    }
    const double sd = std::sqrt(var);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double f = belief.mean(i) + sd * rule.nodes[k];
      logs[k] = std::log(rule.weights[k]) + log_likelihood(like, y(i), f) -
                log_normal_pdf(y(i), sites.A(i) * f + sites.b(i),
                               sites.Omega(i));
      top = std::max(top, logs[k]);
    }
    if (!std::isfinite(top)) {
      throw NumericFailure("log_marginal_pl: correction integral at site " +
                           std::to_string(i) + " is not positive and finite");
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - top);
    total += top + std::log(acc);
  }
  if (!std::isfinite(total)) {
    throw NumericFailure("log_marginal_pl: result is not finite");
  }
  return total;
}

double log_marginal_pl(const Matrix& k, const SiteLinearization& sites,
                       const GaussianBelief& belief,
                       const LikelihoodModel& like, const Vector& y,
                       const QuadratureRule& rule) {
  return log_marginal_pl(GaussianPrior::zero_mean(k), sites, belief, like, y,
                         rule);
}

double engine_log_marginal(const Matrix& x, const Vector& y,
                           const LikelihoodModel& like, const Hyperparams& hp,
                           const FitConfig& config,
                           InferenceReport* report_out) {
  const GaussianPrior prior = GaussianPrior::zero_mean(gram_train(x, hp));
  InferenceReport report = run_engine(config.engine, prior, like, y,
                                      config.inference);
  double value = report.log_marginal;
  if (config.engine == Engine::ppl || config.engine == Engine::spl) {
    value = log_marginal_pl(prior, std::get<SiteLinearization>(report.sites),
                            report.belief, like, y,
                            cached_rule(config.quad_order));
    report.log_marginal = value;
  }
  if (!std::isfinite(value)) {
    throw NumericFailure(std::string("evidence of ") + to_string(config.engine) +
                         " is not finite");
  }
  if (report_out) *report_out = std::move(report);
  return value;
}

FittedModel fit(const Matrix& x, const Vector& y, const LikelihoodModel& like,
                const FitConfig& config) {
  check_training_data(x, y, like);
  if (config.engine == Engine::laplace &&
      like.kind == LikelihoodKind::noisy_threshold) {
    throw UnsupportedLikelihood(
        "laplace cannot be used with the noisy_threshold likelihood");
  }
  config.initial.validate();

  FittedModel model;
  model.like = like;
  model.engine = config.engine;
  model.X_train = x;
  model.y_train = y;

  auto at = [&](const Vector& theta) {
    Hyperparams hp = config.initial;
    hp.log_sigma1_sq = theta(0);
    hp.log_ell = theta(1);
    return hp;
  };
  Vector theta0(2);
  theta0 << config.initial.log_sigma1_sq, config.initial.log_ell;

  Vector best = theta0;
  if (config.optimize) {
    const auto objective = [&](const Vector& theta) {
      const Hyperparams hp = at(theta);
      hp.validate();
      return -engine_log_marginal(x, y, like, hp, config);
    };
    BfgsResult res;
    try {
      res = minimize_bfgs(objective, theta0, config.bfgs);
    } catch (const FitFailure& e) {
      throw FitFailure(std::string("fit: ") + e.what() + " (" +
                       to_string(config.engine) + ", " + like.name() + ")");
    }
    best = res.x;
    model.objective_evals = res.evaluations;
    model.failed_evals = res.failed_evaluations;
  }

  model.hp = at(best);
  InferenceReport report;
  try {
    model.log_marginal =
        engine_log_marginal(x, y, like, model.hp, config, &report);
  } catch (const Error& e) {
    throw FitFailure(std::string("fit: final evaluation failed: ") + e.what());
  }
  model.belief = report.belief;
  model.sites = report_linearization(report, y);
  return model;
}

GaussianBelief latent_posterior(const Matrix& k, const SiteLinearization& sites,
                                const Vector& y, const Matrix& k_star,
                                const Matrix& k_star_star) {
  const long n = k.rows();
  if (k_star.rows() != n || k_star_star.rows() != k_star.cols() ||
      k_star_star.cols() != k_star.cols() || sites.size() != n ||
      y.size() != n) {
    throw InvalidArgument("latent_posterior: dimension mismatch");
  }
  const SiteSystem sys(k, sites);
  GaussianBelief out;
  out.mean = k_star.transpose() * sys.weights(y - sites.b);
  const Matrix v = sys.whiten(k_star);
  out.cov = k_star_star;
  out.cov.noalias() -= v.transpose() * v;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

Prediction predict(const FittedModel& model, const Matrix& x_star) {
  if (x_star.cols() != model.X_train.cols()) {
    throw InvalidArgument("predict: expected " +
                          std::to_string(model.X_train.cols()) +
                          " feature columns, got " +
                          std::to_string(x_star.cols()));
  }
  const SiteLinearization& sites = model.sites;
  const SiteSystem sys(gram_train(model.X_train, model.hp), sites);
  const Matrix k_star = gram_cross(model.X_train, x_star, model.hp);

  Prediction p;
  p.latent_mean = k_star.transpose() * sys.weights(model.y_train - sites.b);
  const Matrix v = sys.whiten(k_star);
  p.latent_var = gram_test_diag(x_star, model.hp) -
                 v.colwise().squaredNorm().transpose();
  p.latent_var = p.latent_var.cwiseMax(0.0);
  const long m = x_star.rows();
  p.expected_label.resize(m);
  p.prob_positive.resize(m);
  for (long i = 0; i < m; ++i) {
    p.expected_label(i) =
        expected_label(model.like, p.latent_mean(i), p.latent_var(i));
    p.prob_positive(i) = 0.5 * (p.expected_label(i) + 1.0);
  }
  return p;
}

Vector predict_labels(const Prediction& pred) {
  return pred.expected_label.unaryExpr(
      [](double e) { return e >= 0.0 ? 1.0 : -1.0; });
}

}  // namespace gppl
