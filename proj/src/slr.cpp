#include "gppl/slr.hpp"

#include <string>

namespace gppl {

SiteLinearization SiteLinearization::zeros(long n) {
  return {Vector::Zero(n), Vector::Zero(n), Vector::Ones(n)};
}

void SiteLinearization::validate() const {
  if (b.size() != A.size() || Omega.size() != A.size()) {
    throw InvalidArgument("SiteLinearization: inconsistent lengths");
  }
  if (!A.allFinite() || !b.allFinite() || !Omega.allFinite()) {
    throw InvalidArgument("SiteLinearization: non-finite entries");
  }
  if ((Omega.array() <= 0.0).any()) {
    throw InvalidArgument("SiteLinearization: Omega must be positive");
  }
}

SiteParams slr_site(const SlrStatistics& stats, double fbar, double p) {
  if (!(p >= kMinSlrVariance) || !std::isfinite(p)) {
    throw InvalidArgument("slr_site: marginal variance " + std::to_string(p) +
                          " is too small to linearise against");
  }
  if (!std::isfinite(stats.z) || !std::isfinite(stats.s) ||
      !std::isfinite(stats.c) || !std::isfinite(fbar)) {
    throw InvalidArgument("slr_site: non-finite statistics");
  }
  SiteParams site;
  site.A = stats.c / p;
  site.b = stats.z - site.A * fbar;
  site.Omega = stats.s - site.A * stats.c;
  if (site.Omega <= kOmegaClamp) {
    if (site.Omega <= -kOmegaClamp) {
      throw InternalConsistency("slr_site: negative Omega " +
                                std::to_string(site.Omega));
    }
    site.Omega = kOmegaClamp;
  }
  return site;
}

SiteParams linearize_site(const LikelihoodModel& like, double fbar, double p) {
  return slr_site(slr_statistics(like, fbar, p), fbar, p);
}

SiteLinearization linearize(const LikelihoodModel& like, const Vector& means,
                            const Vector& vars) {
  if (means.size() != vars.size()) {
    throw InvalidArgument("linearize: mean/variance lengths differ");
  }
  const long n = means.size();
  SiteLinearization out{Vector(n), Vector(n), Vector(n)};
  for (long i = 0; i < n; ++i) {
    const SiteParams s = linearize_site(like, means(i), vars(i));
    out.A(i) = s.A;
    out.b(i) = s.b;
    out.Omega(i) = s.Omega;
  }
  return out;
}

}  // namespace gppl
