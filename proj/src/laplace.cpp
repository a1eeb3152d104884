#include <cmath>

#include "gppl/inference.hpp"
#include "inference_detail.hpp"

namespace gppl {

namespace {

struct NewtonState {
  Vector f;
  Vector a;  // K^{-1} (f - m0)
  double psi = -std::numeric_limits<double>::infinity();
};

double log_joint(const LikelihoodModel& like, const Vector& y, const Vector& f,
                 const Vector& a, const Vector& m0) {
  double sum = -0.5 * a.dot(f - m0);
  for (long i = 0; i < f.size(); ++i) sum += log_likelihood(like, y(i), f(i));
  return sum;
}

void derivatives(const LikelihoodModel& like, const Vector& y, const Vector& f,
                 Vector& grad, Vector& w) {
  for (long i = 0; i < f.size(); ++i) {
    const LogLikDerivatives d = log_likelihood_derivatives(like, y(i), f(i));
    grad(i) = d.d1;
    // Log-concave likelihoods give w >= 0; guard the square root.
    w(i) = std::max(0.0, -d.d2);
  }
}

}  // namespace

InferenceReport laplace(const GaussianPrior& prior, const LikelihoodModel& like,
                        const Vector& y, const InferenceOptions& opts) {
  if (like.kind == LikelihoodKind::noisy_threshold) {
    throw UnsupportedLikelihood(
        "laplace: noisy_threshold likelihood has zero gradient almost "
        "everywhere");
  }
  detail::check_problem(prior, y, like);
  detail::check_options(opts);
  const long n = prior.size();
  const Matrix& k = prior.cov;
  const Vector& m0 = prior.mean;

  InferenceReport report;
  report.mean_history.push_back(m0);
  NewtonState state{m0, Vector::Zero(n)};
  state.psi = log_joint(like, y, state.f, state.a, m0);
  Vector grad(n), w(n);

  for (int it = 1; it <= opts.max_iters; ++it) {
    derivatives(like, y, state.f, grad, w);
    const Vector sw = w.cwiseSqrt();
    Matrix bmat = sw.asDiagonal() * k * sw.asDiagonal();
    bmat.diagonal().array() += 1.0;
    const PdFactor factor(bmat);
    const Vector rhs = w.cwiseProduct(state.f - m0) + grad;
    const Vector a_full =
        rhs - sw.cwiseProduct(factor.solve(Vector(sw.cwiseProduct(k * rhs))));

    // Halve the step while the objective decreases.
    NewtonState next{m0 + k * a_full, a_full};
    next.psi = log_joint(like, y, next.f, next.a, m0);
    for (int halvings = 0; halvings < 20 && !(next.psi >= state.psi - 1e-12);
         ++halvings) {
      next.a = 0.5 * (next.a + state.a);
      next.f = m0 + k * next.a;
      next.psi = log_joint(like, y, next.f, next.a, m0);
    }
    const double change = (next.f - state.f).cwiseAbs().maxCoeff();
    state = std::move(next);
    report.iterations_run = it;
    report.mean_history.push_back(state.f);
    report.diagnostics.push_back({it, change, 0.0});
    if (change < opts.tol) {
      report.converged = true;
      break;
    }
  }

  // Posterior at the mode.
  derivatives(like, y, state.f, grad, w);
  const Vector sw = w.cwiseSqrt();
  Matrix bmat = sw.asDiagonal() * k * sw.asDiagonal();
  bmat.diagonal().array() += 1.0;
  const PdFactor factor(bmat);
  const Matrix v = factor.solve_lower(sw.asDiagonal() * k);
  report.belief.mean = state.f;
  report.belief.cov = k;
  report.belief.cov.noalias() -= v.transpose() * v;
  report.belief.cov = 0.5 * (report.belief.cov + report.belief.cov.transpose());
  for (auto& d : report.diagnostics) {
    d.min_cavity_variance = report.belief.cov.diagonal().minCoeff();
  }
  if (opts.observer) opts.observer(report.iterations_run, report.belief);

  report.log_marginal =
      log_joint(like, y, state.f, state.a, m0) - 0.5 * factor.log_det();
  report.sites = EpSites{w.cwiseProduct(state.f) + grad, w};
  return report;
}

}  // namespace gppl
