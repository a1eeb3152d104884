#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gppl/slr.hpp"

namespace gppl {

/// N(mean, cov) prior over the training latents. The GP case is zero mean
/// with cov = K; the synthetic demo needs a non-zero mean.
struct GaussianPrior {
  Vector mean;
  Matrix cov;

  static GaussianPrior zero_mean(const Matrix& k);
  long size() const { return mean.size(); }
};

struct GaussianBelief {
  Vector mean;
  Matrix cov;
};

/// Gaussian sites in natural parameters, exp(-tau f^2 / 2 + nu f).
struct EpSites {
  Vector nu;
  Vector tau;
};

struct IterationRecord {
  int iteration = 0;
  double max_mean_change = 0.0;
  // EP: smallest cavity variance seen in the pass (may be negative).
  // PL/Laplace: smallest marginal posterior variance.
  double min_cavity_variance = 0.0;
};

enum class EpEventKind { negative_cavity, negative_site, clamped_site };

struct EpEvent {
  int iteration = 0;  // sweep (sequential) or iteration (parallel), from 1
  long site = 0;      // zero-based
  EpEventKind kind = EpEventKind::negative_cavity;
  double variance = 0.0;  // 1 / precision at the time of the event
};

const char* to_string(EpEventKind kind);

struct InferenceOptions {
  int max_iters = 10;
  double tol = 1e-6;
  // Site visiting order for the sequential engines; empty means 0..n-1.
  std::vector<long> order;
  // EP: negative site precisions are replaced by `clamp` when enabled.
  bool clamp_negative_sites = true;
  double clamp = 1e-6;
  // EP: end the run at the first negative cavity instead of skipping the
  // site. Used to reproduce the unfixed algorithm.
  bool stop_on_negative_cavity = false;
  // Called with every recomputed posterior (once per parallel iteration or
  // sequential sweep).
  std::function<void(int, const GaussianBelief&)> observer;
};

struct InferenceReport {
  GaussianBelief belief;
  std::variant<SiteLinearization, EpSites> sites;
  int iterations_run = 0;
  bool converged = false;
  std::vector<IterationRecord> diagnostics;
  std::vector<EpEvent> ep_events;
  // Posterior mean after each iteration, starting with the prior mean.
  std::vector<Vector> mean_history;
  // Engine evidence approximation (EP and Laplace); NaN for PL, whose
  // evidence is computed by log_marginal_pl.
  double log_marginal = std::numeric_limits<double>::quiet_NaN();
};

/// Raised when an EP run cannot produce a valid posterior. Carries the
/// partial report so the diagnostics survive.
class InferenceError : public NotPositiveDefinite {
 public:
  InferenceError(const std::string& what, long minor,
                 std::shared_ptr<const InferenceReport> report)
      : NotPositiveDefinite(what, minor), report_(std::move(report)) {}
  const InferenceReport* report() const { return report_.get(); }

 private:
  std::shared_ptr<const InferenceReport> report_;
};

/// S = A K A' + Omega, held as S = Omega^{1/2} B Omega^{1/2} with
/// B = I + D K D and D = A / sqrt(Omega). B has eigenvalues >= 1, so sites
/// with tiny Omega (confident labels) do not wreck the factorisation.
class SiteSystem {
 public:
  SiteSystem(const Matrix& k, const SiteLinearization& sites);

  /// A .* (S^{-1} r).
  Vector weights(const Vector& r) const;
  /// L^{-1} D M, with L the Cholesky factor of B. For any M,
  /// M' A S^{-1} A M equals W'W where W = whiten(M).
  Matrix whiten(const Matrix& m) const;
  /// r' S^{-1} r.
  double quad(const Vector& r) const;
  double log_det() const;

 private:
  Vector d_;
  Vector inv_sqrt_omega_;
  double log_det_omega_ = 0.0;
  std::unique_ptr<PdFactor> factor_;
};

/// Closed-form Gaussian posterior when every site is affine-Gaussian:
///   mean = m0 + K A' S^{-1} (y - b - A m0),  cov = K - K A' S^{-1} A K.
GaussianBelief linear_posterior(const GaussianPrior& prior,
                                const SiteLinearization& sites,
                                const Vector& y);
GaussianBelief linear_posterior(const Matrix& k, const SiteLinearization& sites,
                                const Vector& y);

/// Posterior under natural-parameter sites. Uses the symmetric
/// I + T^{1/2} K T^{1/2} factorisation when every tau >= 0, an LU solve
/// otherwise (unfixed EP can produce negative tau).
GaussianBelief natural_posterior(const GaussianPrior& prior,
                                 const EpSites& sites);

/// Affine sites with the same effect on the posterior as `sites`
/// (A = sqrt(tau), Omega = 1, b = y - nu / sqrt(tau)). Requires tau >= 0.
SiteLinearization equivalent_linearization(const EpSites& sites,
                                           const Vector& y);

/// Natural parameters of affine sites: tau = A^2/Omega, nu = A(y-b)/Omega.
EpSites natural_sites(const SiteLinearization& sites, const Vector& y);

// Iterated posterior linearisation.
InferenceReport pl_parallel(const GaussianPrior& prior,
                            const LikelihoodModel& like, const Vector& y,
                            const InferenceOptions& opts = {});
InferenceReport pl_sequential(const GaussianPrior& prior,
                              const LikelihoodModel& like, const Vector& y,
                              const InferenceOptions& opts = {});

// Expectation propagation.
InferenceReport ep_sequential(const GaussianPrior& prior,
                              const LikelihoodModel& like, const Vector& y,
                              const InferenceOptions& opts = {});
InferenceReport ep_parallel(const GaussianPrior& prior,
                            const LikelihoodModel& like, const Vector& y,
                            const InferenceOptions& opts = {});

/// Newton iterations for the posterior mode (opts.max_iters, opts.tol),
/// in the B = I + W^{1/2} K W^{1/2} form.
InferenceReport laplace(const GaussianPrior& prior, const LikelihoodModel& like,
                        const Vector& y, const InferenceOptions& opts = {});

enum class Engine { laplace, pep, sep, ppl, spl };

const char* to_string(Engine e);
Engine parse_engine(const std::string& text);

InferenceReport run_engine(Engine engine, const GaussianPrior& prior,
                           const LikelihoodModel& like, const Vector& y,
                           const InferenceOptions& opts = {});

/// Sites of any engine as an affine linearisation, for prediction.
SiteLinearization report_linearization(const InferenceReport& report,
                                       const Vector& y);

}  // namespace gppl
