#pragma once

#include <string>

#include "gppl/numerics.hpp"

namespace gppl {

enum class LikelihoodKind {
  probit,
  logit,
  noisy_threshold,
  // Affine-Gaussian channel p(y|f) = N(y; slope*f + offset, noise). Not a
  // classifier; every approximation is exact on it, which makes it the
  // reference case for the engines and the evidence code.
  gaussian,
};

struct LikelihoodModel {
  LikelihoodKind kind = LikelihoodKind::probit;
  double epsilon = 0.0;  // noisy_threshold only, in (0, 0.5)
  int quad_order = 10;   // logit only
  double slope = 1.0;    // gaussian only
  double offset = 0.0;
  double noise = 1.0;

  static LikelihoodModel probit();
  static LikelihoodModel logit(int quad_order = 10);
  static LikelihoodModel noisy_threshold(double epsilon = 0.01);
  static LikelihoodModel gaussian(double slope, double offset, double noise);

  void validate() const;
  /// True for the three classification models (labels must be +-1).
  bool binary_labels() const { return kind != LikelihoodKind::gaussian; }
  /// probit | logit(10) | noisy_threshold(0.01) | gaussian(a,b,c)
  std::string name() const;
};

/// Parses the names produced by LikelihoodModel::name().
LikelihoodModel parse_likelihood(const std::string& text);

struct CondMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// E[y|f] and C[y|f].
CondMoments cond_moments(const LikelihoodModel& like, double f);

/// log p(y|f).
double log_likelihood(const LikelihoodModel& like, double y, double f);

/// Gaussian expectations of the conditional moments under f ~ N(fbar, P):
///   z = E_f[E[y|f]]
///   s = C_f[E[y|f]] + E_f[C[y|f]]
///   c = C_f[f, E[y|f]]
/// None of these depend on an observed label.
struct SlrStatistics {
  double z = 0.0;
  double s = 0.0;
  double c = 0.0;
};

SlrStatistics slr_statistics(const LikelihoodModel& like, double fbar, double p);

/// Moments of p(y|f) N(f; mean, var) normalised, plus log of the
/// normaliser. Used by EP.
struct TiltedMoments {
  double log_z = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

TiltedMoments tilted_moments(const LikelihoodModel& like, double y,
                             double cavity_mean, double cavity_var);

/// First two derivatives of log p(y|f) in f. Throws UnsupportedLikelihood for
/// noisy_threshold, whose gradient is zero almost everywhere.
struct LogLikDerivatives {
  double d1 = 0.0;
  double d2 = 0.0;
};

LogLikDerivatives log_likelihood_derivatives(const LikelihoodModel& like,
                                             double y, double f);

/// E[y* | data] = integral of E[y*|f*] N(f*; mean, var).
double expected_label(const LikelihoodModel& like, double mean, double var);

/// Shared, lazily built Gauss-Hermite rules (orders 1..64).
const QuadratureRule& cached_rule(int order);

}  // namespace gppl
