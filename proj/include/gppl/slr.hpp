#pragma once

#include "gppl/likelihoods.hpp"

namespace gppl {

/// Affine site parameters E[y_i|f_i] ~ A_i f_i + b_i, C[y_i|f_i] ~ Omega_i.
struct SiteLinearization {
  Vector A;
  Vector b;
  Vector Omega;

  long size() const { return A.size(); }
  static SiteLinearization zeros(long n);  // A = b = 0, Omega = 1
  void validate() const;
};

struct SiteParams {
  double A = 0.0;
  double b = 0.0;
  double Omega = 0.0;
};

// Omega in (-kOmegaClamp, kOmegaClamp] is raised to kOmegaClamp; anything
// more negative means the statistics are broken.
inline constexpr double kOmegaClamp = 1e-10;
inline constexpr double kMinSlrVariance = 1e-12;

/// Best affine fit of E[y|f] under f ~ N(fbar, p); Omega is the residual
/// mean-square error plus E_f[C[y|f]].
SiteParams slr_site(const SlrStatistics& stats, double fbar, double p);

/// slr_site for one likelihood against N(fbar, p).
SiteParams linearize_site(const LikelihoodModel& like, double fbar, double p);

/// Relinearise every site against the marginals (means[i], vars[i]).
SiteLinearization linearize(const LikelihoodModel& like, const Vector& means,
                            const Vector& vars);

}  // namespace gppl
