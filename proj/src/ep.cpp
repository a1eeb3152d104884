#include <cmath>
#include <limits>
#include <memory>

#include "gppl/inference.hpp"
#include "inference_detail.hpp"

namespace gppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SiteUpdate {
  bool skipped = false;
  double tau = 0.0;
  double nu = 0.0;
  double cavity_var = 0.0;
};

// Cavity, tilted moments and the new site for index i. Negative cavities and
// negative site precisions are logged in `report`.
SiteUpdate update_site(const GaussianBelief& b, const EpSites& sites, long i,
                       const LikelihoodModel& like, double y, int iteration,
                       const InferenceOptions& opts, InferenceReport& report) {
  SiteUpdate u;
  const double tau_c = 1.0 / b.cov(i, i) - sites.tau(i);
  const double nu_c = b.mean(i) / b.cov(i, i) - sites.nu(i);
  u.cavity_var = tau_c != 0.0 ? 1.0 / tau_c : -kInf;
  if (!(tau_c > 0.0)) {
    report.ep_events.push_back(
        {iteration, i, EpEventKind::negative_cavity, u.cavity_var});
    u.skipped = true;
    return u;
  }
  const TiltedMoments t = tilted_moments(like, y, nu_c / tau_c, 1.0 / tau_c);
  if (!(t.variance > 0.0)) {
    throw NumericFailure("ep: tilted variance is not positive at site " +
                         std::to_string(i));
  }
  u.tau = 1.0 / t.variance - tau_c;
  u.nu = t.mean / t.variance - nu_c;
  if (u.tau < 0.0) {
    report.ep_events.push_back(
        {iteration, i, EpEventKind::negative_site, 1.0 / u.tau});
    if (opts.clamp_negative_sites) {
      report.ep_events.push_back(
          {iteration, i, EpEventKind::clamped_site, 1.0 / opts.clamp});
      u.tau = opts.clamp;
    }
  }
  return u;
}

GaussianBelief recompute(const GaussianPrior& prior, const EpSites& sites,
                         InferenceReport& report) {
  try {
    return natural_posterior(prior, sites);
  } catch (const NotPositiveDefinite& e) {
    report.sites = sites;
    throw InferenceError(std::string("ep: ") + e.what(), e.minor(),
                         std::make_shared<const InferenceReport>(report));
  }
}

void check_ep_options(const InferenceOptions& opts) {
  detail::check_options(opts);
  if (!(opts.clamp > 0.0)) {
    throw InvalidArgument("ep: clamp must be positive");
  }
}

// Standard EP evidence in natural parameters. Each site is
// C_i exp(-tau_i f^2/2 + nu_i f) with C_i fixed by matching the tilted
// normaliser at the final cavity; the Gaussian integral of the prior times
// all sites is done with B = I + T^{1/2} K T^{1/2}.
double ep_log_marginal(const GaussianPrior& prior, const LikelihoodModel& like,
                       const Vector& y, const EpSites& sites,
                       const GaussianBelief& b) {
  const long n = prior.size();
  if ((sites.tau.array() < 0.0).any()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double log_c = 0.0;
  for (long i = 0; i < n; ++i) {
    const double v = b.cov(i, i);
    const double tau_c = 1.0 / v - sites.tau(i);
    const double nu_c = b.mean(i) / v - sites.nu(i);
    if (!(tau_c > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const TiltedMoments t = tilted_moments(like, y(i), nu_c / tau_c, 1.0 / tau_c);
    log_c += t.log_z - 0.5 * std::log(tau_c * v) -
             0.5 * b.mean(i) * b.mean(i) / v + 0.5 * nu_c * nu_c / tau_c;
  }
  const Vector sw = sites.tau.cwiseSqrt();
  Matrix bmat = sw.asDiagonal() * prior.cov * sw.asDiagonal();
  bmat.diagonal().array() += 1.0;
  const PdFactor factor(bmat);
  const Vector r = sites.nu - sites.tau.cwiseProduct(prior.mean);
  return log_c - 0.5 * factor.log_det() + 0.5 * r.dot(b.cov * r) -
         0.5 * prior.mean.dot(sites.tau.cwiseProduct(prior.mean)) +
         sites.nu.dot(prior.mean);
}

void finish(const GaussianPrior& prior, const LikelihoodModel& like,
            const Vector& y, EpSites sites, InferenceReport& report) {
  try {
    report.log_marginal = ep_log_marginal(prior, like, y, sites, report.belief);
  } catch (const Error&) {
    report.log_marginal = std::numeric_limits<double>::quiet_NaN();
  }
  report.sites = std::move(sites);
}

}  // namespace

InferenceReport ep_sequential(const GaussianPrior& prior,
                              const LikelihoodModel& like, const Vector& y,
                              const InferenceOptions& opts) {
  detail::check_problem(prior, y, like);
  check_ep_options(opts);
  const long n = prior.size();
  const std::vector<long> order = detail::visiting_order(opts, n);

  InferenceReport report;
  report.belief = {prior.mean, prior.cov};
  report.mean_history.push_back(prior.mean);
  EpSites sites{Vector::Zero(n), Vector::Zero(n)};
  for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
    const Vector previous = report.belief.mean;
    double min_cavity = kInf;
    bool stopped = false;
    for (long i : order) {
      const SiteUpdate u = update_site(report.belief, sites, i, like, y(i),
                                       sweep, opts, report);
      min_cavity = std::min(min_cavity, u.cavity_var);
      if (u.skipped) {
        if (opts.stop_on_negative_cavity) {
          stopped = true;
          break;
        }
        continue;
      }
      detail::rank_one_update(report.belief, i, u.tau - sites.tau(i),
                              u.nu - sites.nu(i));
      sites.tau(i) = u.tau;
      sites.nu(i) = u.nu;
    }
    report.belief = recompute(prior, sites, report);
    const double change =
        (report.belief.mean - previous).cwiseAbs().maxCoeff();
    report.iterations_run = sweep;
    report.mean_history.push_back(report.belief.mean);
    report.diagnostics.push_back({sweep, change, min_cavity});
    if (opts.observer) opts.observer(sweep, report.belief);
    if (stopped) break;
    if (change < opts.tol) {
      report.converged = true;
      break;
    }
  }
  finish(prior, like, y, std::move(sites), report);
  return report;
}

InferenceReport ep_parallel(const GaussianPrior& prior,
                            const LikelihoodModel& like, const Vector& y,
                            const InferenceOptions& opts) {
  detail::check_problem(prior, y, like);
  check_ep_options(opts);
  const long n = prior.size();

  InferenceReport report;
  report.belief = {prior.mean, prior.cov};
  report.mean_history.push_back(prior.mean);
  EpSites sites{Vector::Zero(n), Vector::Zero(n)};
  for (int it = 1; it <= opts.max_iters; ++it) {
    double min_cavity = kInf;
    bool stopped = false;
    EpSites next = sites;
    for (long i = 0; i < n; ++i) {
      const SiteUpdate u =
          update_site(report.belief, sites, i, like, y(i), it, opts, report);
      min_cavity = std::min(min_cavity, u.cavity_var);
      if (u.skipped) {
        stopped = stopped || opts.stop_on_negative_cavity;
        continue;
      }
      next.tau(i) = u.tau;
      next.nu(i) = u.nu;
    }
    if (stopped) {
      report.iterations_run = it;
      report.diagnostics.push_back({it, 0.0, min_cavity});
      break;
    }
    sites = std::move(next);
    const Vector previous = report.belief.mean;
    report.belief = recompute(prior, sites, report);
    const double change =
        (report.belief.mean - previous).cwiseAbs().maxCoeff();
    report.iterations_run = it;
    report.mean_history.push_back(report.belief.mean);
    report.diagnostics.push_back({it, change, min_cavity});
    if (opts.observer) opts.observer(it, report.belief);
    if (change < opts.tol) {
      report.converged = true;
      break;
    }
  }
  finish(prior, like, y, std::move(sites), report);
  return report;
}

}  // namespace gppl
