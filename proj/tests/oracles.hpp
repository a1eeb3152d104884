#pragma once

// Reference computations for the tests. Nothing here calls the library's
// quadrature or closed forms; integrals go through Boost's adaptive
// Gauss-Kronrod rule on finite intervals around the Gaussian mass.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "gppl/likelihoods.hpp"

namespace oracle {

inline double phi(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Integral of g(f) N(f; m, v) df. `breaks` are points where g may jump;
/// the range is cut there so each piece is smooth.
inline double gauss_expect(const std::function<double(double)>& g, double m,
                           double v, std::vector<double> breaks = {}) {
  using boost::math::quadrature::gauss_kronrod;
  const double sd = std::sqrt(v);
  const double lo = m - 12.0 * sd, hi = m + 12.0 * sd;
  std::vector<double> cuts{lo};
  for (double b : breaks) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double x) { return g(x) * phi((x - m) / sd) / sd; };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 15,
                                                  1e-14);
  }
  return total;
}

/// E[y|f] for the three classifiers, written out independently.
inline double cond_mean(const gppl::LikelihoodModel& like, double f) {
  switch (like.kind) {
    case gppl::LikelihoodKind::probit:
      return 2.0 * Phi(f) - 1.0;
    case gppl::LikelihoodKind::logit:
      return std::tanh(0.5 * f);
    case gppl::LikelihoodKind::noisy_threshold:
      return f > 0.0 ? 1.0 - 2.0 * like.epsilon : -(1.0 - 2.0 * like.epsilon);
    case gppl::LikelihoodKind::gaussian:
      return like.slope * f + like.offset;
  }
  return 0.0;
}

inline double cond_var(const gppl::LikelihoodModel& like, double f) {
  if (like.kind == gppl::LikelihoodKind::gaussian) return like.noise;
  const double m = cond_mean(like, f);
  return 1.0 - m * m;
}

inline double lik(const gppl::LikelihoodModel& like, double y, double f) {
  switch (like.kind) {
    case gppl::LikelihoodKind::probit:
      return Phi(y * f);
    case gppl::LikelihoodKind::logit:
      return 1.0 / (1.0 + std::exp(-y * f));
    case gppl::LikelihoodKind::noisy_threshold:
      return y * f > 0.0 ? 1.0 - like.epsilon : like.epsilon;
    case gppl::LikelihoodKind::gaussian: {
      const double r = y - like.slope * f - like.offset;
      return std::exp(-0.5 * r * r / like.noise) /
             std::sqrt(2.0 * std::numbers::pi * like.noise);
    }
  }
  return 0.0;
}

struct Stats {
  double z, s, c;
};

/// z = E[E[y|f]], s = Var_f(E[y|f]) + E_f[C[y|f]], c = Cov(f, E[y|f]).
inline Stats slr_stats(const gppl::LikelihoodModel& like, double fbar,
                       double p) {
  const std::vector<double> br =
      like.kind == gppl::LikelihoodKind::noisy_threshold ? std::vector<double>{0.0}
                                                         : std::vector<double>{};
  auto mean = [&](double f) { return cond_mean(like, f); };
  const double z = gauss_expect(mean, fbar, p, br);
  const double e2 = gauss_expect([&](double f) { return mean(f) * mean(f); },
                                 fbar, p, br);
  const double ec = gauss_expect([&](double f) { return cond_var(like, f); },
                                 fbar, p, br);
  const double c = gauss_expect(
      [&](double f) { return (f - fbar) * mean(f); }, fbar, p, br);
  return {z, e2 - z * z + ec, c};
}

}  // namespace oracle
