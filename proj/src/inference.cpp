#include "gppl/inference.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

#include "inference_detail.hpp"

namespace gppl {

GaussianPrior GaussianPrior::zero_mean(const Matrix& k) {
  return {Vector::Zero(k.rows()), k};
}

const char* to_string(EpEventKind kind) {
  switch (kind) {
    case EpEventKind::negative_cavity:
      return "negative_cavity";
    case EpEventKind::negative_site:
      return "negative_site";
    case EpEventKind::clamped_site:
      return "clamped_site";
  }
  return "?";
}

const char* to_string(Engine e) {
  switch (e) {
    case Engine::laplace:
      return "laplace";
    case Engine::pep:
      return "pep";
    case Engine::sep:
      return "sep";
    case Engine::ppl:
      return "ppl";
    case Engine::spl:
      return "spl";
  }
  return "?";
}

Engine parse_engine(const std::string& text) {
  if (text == "laplace" || text == "l") return Engine::laplace;
  if (text == "pep") return Engine::pep;
  if (text == "sep") return Engine::sep;
  if (text == "ppl") return Engine::ppl;
  if (text == "spl") return Engine::spl;
  throw ParseError("unknown algorithm: " + text);
}

namespace detail {

void check_problem(const GaussianPrior& prior, const Vector& y,
                   const LikelihoodModel& like) {
  const long n = prior.mean.size();
  if (n < 1) throw InvalidArgument("inference: empty problem");
  if (prior.cov.rows() != n || prior.cov.cols() != n || y.size() != n) {
    throw InvalidArgument("inference: dimension mismatch");
  }
  if (!prior.cov.allFinite() || !prior.mean.allFinite() || !y.allFinite()) {
    throw InvalidArgument("inference: non-finite input");
  }
  like.validate();
  if (like.binary_labels()) {
    for (long i = 0; i < n; ++i) {
      if (y(i) != 1.0 && y(i) != -1.0) {
        throw InvalidArgument("inference: labels must be +1 or -1");
      }
    }
  }
}

std::vector<long> visiting_order(const InferenceOptions& opts, long n) {
  if (opts.order.empty()) {
    std::vector<long> order(n);
    for (long i = 0; i < n; ++i) order[i] = i;
    return order;
  }
  std::vector<long> seen(n, 0);
  for (long i : opts.order) {
    if (i < 0 || i >= n || seen[i]++) {
      throw InvalidArgument("inference: order is not a permutation of sites");
    }
  }
  if (static_cast<long>(opts.order.size()) != n) {
    throw InvalidArgument("inference: order must visit every site once");
  }
  return opts.order;
}

void check_options(const InferenceOptions& opts) {
  if (opts.max_iters < 1) {
    throw InvalidArgument("inference: max_iters must be at least 1");
  }
  if (!(opts.tol >= 0.0)) throw InvalidArgument("inference: tol must be >= 0");
}

void rank_one_update(GaussianBelief& b, long i, double dtau, double dnu) {
  if (dtau == 0.0 && dnu == 0.0) return;
  const Vector s = b.cov.col(i);
  const double denom = 1.0 + dtau * s(i);
  const double mean_step = (dnu - dtau * b.mean(i)) / denom;
  b.cov.noalias() -= (dtau / denom) * s * s.transpose();
  b.mean += mean_step * s;
}

}  // namespace detail

SiteSystem::SiteSystem(const Matrix& k, const SiteLinearization& sites) {
  sites.validate();
  if (sites.size() != k.rows() || k.rows() != k.cols()) {
    throw InvalidArgument("SiteSystem: dimension mismatch");
  }
  inv_sqrt_omega_ = sites.Omega.cwiseSqrt().cwiseInverse();
  d_ = sites.A.cwiseProduct(inv_sqrt_omega_);
  log_det_omega_ = sites.Omega.array().log().sum();
  Matrix b = d_.asDiagonal() * k * d_.asDiagonal();
  b.diagonal().array() += 1.0;
  factor_ = std::make_unique<PdFactor>(b);
}

Vector SiteSystem::weights(const Vector& r) const {
  return d_.cwiseProduct(
      factor_->solve(Vector(r.cwiseProduct(inv_sqrt_omega_))));
}

Matrix SiteSystem::whiten(const Matrix& m) const {
  return factor_->solve_lower(d_.asDiagonal() * m);
}

double SiteSystem::quad(const Vector& r) const {
  return factor_->solve_lower(Matrix(r.cwiseProduct(inv_sqrt_omega_)))
      .squaredNorm();
}

double SiteSystem::log_det() const {
  return log_det_omega_ + factor_->log_det();
}

GaussianBelief linear_posterior(const GaussianPrior& prior,
                                const SiteLinearization& sites,
                                const Vector& y) {
  const long n = prior.mean.size();
  sites.validate();
  if (sites.size() != n || y.size() != n || prior.cov.rows() != n) {
    throw InvalidArgument("linear_posterior: dimension mismatch");
  }
  const Matrix& k = prior.cov;
  const SiteSystem sys(k, sites);
  const Vector resid = y - sites.b - sites.A.cwiseProduct(prior.mean);
  GaussianBelief out;
  out.mean = prior.mean + k * sys.weights(resid);
  const Matrix v = sys.whiten(k);
  out.cov = k;
  out.cov.noalias() -= v.transpose() * v;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

GaussianBelief linear_posterior(const Matrix& k, const SiteLinearization& sites,
                                const Vector& y) {
  return linear_posterior(GaussianPrior::zero_mean(k), sites, y);
}

GaussianBelief natural_posterior(const GaussianPrior& prior,
                                 const EpSites& sites) {
  const long n = prior.mean.size();
  if (sites.tau.size() != n || sites.nu.size() != n) {
    throw InvalidArgument("natural_posterior: dimension mismatch");
  }
  const Matrix& k = prior.cov;
  GaussianBelief out;
  if ((sites.tau.array() >= 0.0).all()) {
    const Vector sw = sites.tau.cwiseSqrt();
    Matrix b = sw.asDiagonal() * k * sw.asDiagonal();
    b.diagonal().array() += 1.0;
    const PdFactor factor(b);
    const Matrix v = factor.solve_lower(sw.asDiagonal() * k);
    out.cov = k;
    out.cov.noalias() -= v.transpose() * v;
  } else {
    Matrix m = k * sites.tau.asDiagonal();
    m.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Matrix> lu(m);
    out.cov = lu.solve(k);
    if (!out.cov.allFinite()) {
      throw NotPositiveDefinite("natural_posterior: I + K T is singular", 0);
    }
  }
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  out.mean = prior.mean +
             out.cov * (sites.nu - sites.tau.cwiseProduct(prior.mean));
  return out;
}

SiteLinearization equivalent_linearization(const EpSites& sites,
                                           const Vector& y) {
  const long n = sites.tau.size();
  if (y.size() != n) {
    throw InvalidArgument("equivalent_linearization: dimension mismatch");
  }
  SiteLinearization out = SiteLinearization::zeros(n);
  for (long i = 0; i < n; ++i) {
    const double tau = sites.tau(i);
    if (tau < 0.0) {
      throw InvalidArgument(
          "equivalent_linearization: negative site precision");
    }
    if (tau == 0.0) continue;
    const double a = std::sqrt(tau);
    out.A(i) = a;
    out.b(i) = y(i) - sites.nu(i) / a;
  }
  return out;
}

EpSites natural_sites(const SiteLinearization& sites, const Vector& y) {
  EpSites out;
  out.tau = sites.A.array().square() / sites.Omega.array();
  out.nu = sites.A.array() * (y - sites.b).array() / sites.Omega.array();
  return out;
}

InferenceReport pl_parallel(const GaussianPrior& prior,
                            const LikelihoodModel& like, const Vector& y,
                            const InferenceOptions& opts) {
  detail::check_problem(prior, y, like);
  detail::check_options(opts);
  InferenceReport report;
  report.belief = {prior.mean, prior.cov};
  report.mean_history.push_back(prior.mean);
  SiteLinearization sites;
  for (int it = 1; it <= opts.max_iters; ++it) {
    sites = linearize(like, report.belief.mean, report.belief.cov.diagonal());
    GaussianBelief next = linear_posterior(prior, sites, y);
    const double change =
        (next.mean - report.belief.mean).cwiseAbs().maxCoeff();
    report.belief = std::move(next);
    report.iterations_run = it;
    report.mean_history.push_back(report.belief.mean);
    report.diagnostics.push_back(
        {it, change, report.belief.cov.diagonal().minCoeff()});
    if (opts.observer) opts.observer(it, report.belief);
    if (change < opts.tol) {
      report.converged = true;
      break;
    }
  }
  report.sites = std::move(sites);
  return report;
}

InferenceReport pl_sequential(const GaussianPrior& prior,
                              const LikelihoodModel& like, const Vector& y,
                              const InferenceOptions& opts) {
  detail::check_problem(prior, y, like);
  detail::check_options(opts);
  const long n = prior.size();
  const std::vector<long> order = detail::visiting_order(opts, n);

  InferenceReport report;
  report.belief = {prior.mean, prior.cov};
  report.mean_history.push_back(prior.mean);
  SiteLinearization sites = SiteLinearization::zeros(n);
  EpSites natural{Vector::Zero(n), Vector::Zero(n)};
  for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
    const Vector previous = report.belief.mean;
    GaussianBelief& b = report.belief;
    for (long i : order) {
      const SiteParams s = linearize_site(like, b.mean(i), b.cov(i, i));
      sites.A(i) = s.A;
      sites.b(i) = s.b;
      sites.Omega(i) = s.Omega;
      const double tau = s.A * s.A / s.Omega;
      const double nu = s.A * (y(i) - s.b) / s.Omega;
      detail::rank_one_update(b, i, tau - natural.tau(i), nu - natural.nu(i));
      natural.tau(i) = tau;
      natural.nu(i) = nu;
    }
    // The rank-one updates drift; resynchronise from the sites.
    b = linear_posterior(prior, sites, y);
    const double change = (b.mean - previous).cwiseAbs().maxCoeff();
    report.iterations_run = sweep;
    report.mean_history.push_back(b.mean);
    report.diagnostics.push_back({sweep, change, b.cov.diagonal().minCoeff()});
    if (opts.observer) opts.observer(sweep, b);
    if (change < opts.tol) {
      report.converged = true;
      break;
    }
  }
  report.sites = std::move(sites);
  return report;
}

InferenceReport run_engine(Engine engine, const GaussianPrior& prior,
                           const LikelihoodModel& like, const Vector& y,
                           const InferenceOptions& opts) {
  switch (engine) {
    case Engine::laplace:
      return laplace(prior, like, y, opts);
    case Engine::pep:
      return ep_parallel(prior, like, y, opts);
    case Engine::sep:
      return ep_sequential(prior, like, y, opts);
    case Engine::ppl:
      return pl_parallel(prior, like, y, opts);
    case Engine::spl:
      return pl_sequential(prior, like, y, opts);
  }
  throw InvalidArgument("run_engine: unknown engine");
}

SiteLinearization report_linearization(const InferenceReport& report,
                                       const Vector& y) {
  if (const auto* lin = std::get_if<SiteLinearization>(&report.sites)) {
    return *lin;
  }
  return equivalent_linearization(std::get<EpSites>(report.sites), y);
}

}  // namespace gppl
