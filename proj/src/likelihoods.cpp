#include "gppl/likelihoods.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

namespace gppl {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

void require_label(const LikelihoodModel& like, double y) {
  if (like.binary_labels() && y != 1.0 && y != -1.0) {
    throw InvalidArgument("label must be +1 or -1, got " + std::to_string(y));
  }
  if (!std::isfinite(y)) throw InvalidArgument("label is not finite");
}

std::string shortest(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

// Probabilities that the noisy threshold reports +1 and -1 when
// f ~ N(fbar, p): beta = eps + (1-2eps) Phi(fbar/sqrt(p)) and its complement,
// each computed from its own tail to keep 4*beta*(1-beta) accurate.
std::pair<double, double> nt_beta(double eps, double fbar, double p) {
  const double x = fbar / std::sqrt(p);
  return {eps + (1.0 - 2.0 * eps) * normal_cdf(x),
          eps + (1.0 - 2.0 * eps) * normal_cdf(-x)};
}

}  // namespace

LikelihoodModel LikelihoodModel::probit() { return {}; }

LikelihoodModel LikelihoodModel::logit(int quad_order) {
  LikelihoodModel m;
  m.kind = LikelihoodKind::logit;
  m.quad_order = quad_order;
  m.validate();
  return m;
}

LikelihoodModel LikelihoodModel::noisy_threshold(double epsilon) {
  LikelihoodModel m;
  m.kind = LikelihoodKind::noisy_threshold;
  m.epsilon = epsilon;
  m.validate();
  return m;
}

LikelihoodModel LikelihoodModel::gaussian(double slope, double offset,
                                          double noise) {
  LikelihoodModel m;
  m.kind = LikelihoodKind::gaussian;
  m.slope = slope;
  m.offset = offset;
  m.noise = noise;
  m.validate();
  return m;
}

void LikelihoodModel::validate() const {
  switch (kind) {
    case LikelihoodKind::noisy_threshold:
      if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw InvalidArgument("noisy_threshold: epsilon must be in (0, 0.5)");
      }
      break;
    case LikelihoodKind::logit:
      if (quad_order < 1 || quad_order > 64) {
        throw InvalidArgument("logit: quadrature order must be in [1, 64]");
      }
      break;
    case LikelihoodKind::gaussian:
      if (!(noise > 0.0) || !std::isfinite(slope) || !std::isfinite(offset)) {
        throw InvalidArgument("gaussian channel: noise must be positive");
      }
      break;
    case LikelihoodKind::probit:
      break;
  }
}

std::string LikelihoodModel::name() const {
  switch (kind) {
    case LikelihoodKind::probit:
      return "probit";
    case LikelihoodKind::logit:
      return "logit(" + std::to_string(quad_order) + ")";
    case LikelihoodKind::noisy_threshold:
      return "noisy_threshold(" + shortest(epsilon) + ")";
    case LikelihoodKind::gaussian:
      return "gaussian(" + shortest(slope) + "," + shortest(offset) + "," +
             shortest(noise) + ")";
  }
  return "?";
}

LikelihoodModel parse_likelihood(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  }
  const auto open = text.find('(');
  const std::string head = text.substr(0, open);
  std::vector<double> args;
  if (open != std::string::npos) {
    if (text.back() != ')') throw ParseError("bad likelihood: " + raw);
    std::stringstream ss(text.substr(open + 1, text.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw ParseError("bad number");
      } catch (const std::exception&) {
        throw ParseError("bad likelihood argument '" + item + "' in " + raw);
      }
    }
  }
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ParseError("wrong number of arguments in likelihood " + raw);
    }
  };
  if (head == "probit") {
    want(0, 0);
    return LikelihoodModel::probit();
  }
  if (head == "logit") {
    want(0, 1);
    return LikelihoodModel::logit(args.empty() ? 10 : static_cast<int>(args[0]));
  }
  if (head == "noisy_threshold" || head == "nt") {
    want(0, 1);
    return LikelihoodModel::noisy_threshold(args.empty() ? 0.01 : args[0]);
  }
  if (head == "gaussian") {
    want(3, 3);
    return LikelihoodModel::gaussian(args[0], args[1], args[2]);
  }
  throw ParseError("unknown likelihood: " + raw);
}

const QuadratureRule& cached_rule(int order) {
  static std::array<std::unique_ptr<QuadratureRule>, 65> rules;
  static std::array<std::once_flag, 65> flags;
  if (order < 1 || order > 64) {
    throw InvalidArgument("quadrature order must be in [1, 64]");
  }
  std::call_once(flags[order], [order] {
    rules[order] = std::make_unique<QuadratureRule>(gauss_hermite_rule(order));
  });
  return *rules[order];
}

CondMoments cond_moments(const LikelihoodModel& like, double f) {
  if (!std::isfinite(f)) throw InvalidArgument("cond_moments: f not finite");
  double mean = 0.0;
  switch (like.kind) {
    case LikelihoodKind::probit:
      // Phi(f) - Phi(-f); 1 - mean^2 = 4 Phi(f) Phi(-f).
      return {normal_cdf(f) - normal_cdf(-f),
              4.0 * normal_cdf(f) * normal_cdf(-f)};
    case LikelihoodKind::logit: {
      mean = std::tanh(0.5 * f);
      return {mean, 4.0 * sigmoid(f) * sigmoid(-f)};
    }
    case LikelihoodKind::noisy_threshold: {
      const double eps = like.epsilon;
      // H(0) = 0, so both labels have probability eps at f = 0.
      const double p_pos = f > 0.0 ? 1.0 - eps : eps;
      const double p_neg = f < 0.0 ? 1.0 - eps : eps;
      mean = p_pos - p_neg;
      return {mean, 1.0 - mean * mean};
    }
    case LikelihoodKind::gaussian:
      return {like.slope * f + like.offset, like.noise};
  }
  return {};
}

double log_likelihood(const LikelihoodModel& like, double y, double f) {
  require_label(like, y);
  switch (like.kind) {
    case LikelihoodKind::probit:
      return log_normal_cdf(y * f);
    case LikelihoodKind::logit:
      return log_sigmoid(y * f);
    case LikelihoodKind::noisy_threshold:
      return std::log(like.epsilon +
                      (1.0 - 2.0 * like.epsilon) * (y * f > 0.0 ? 1.0 : 0.0));
    case LikelihoodKind::gaussian:
      return log_normal_pdf(y, like.slope * f + like.offset, like.noise);
  }
  return 0.0;
}

SlrStatistics slr_statistics(const LikelihoodModel& like, double fbar,
                             double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw InvalidArgument("slr_statistics: variance must be positive");
  }
  if (!std::isfinite(fbar)) {
    throw InvalidArgument("slr_statistics: mean is not finite");
  }
  SlrStatistics st;
  switch (like.kind) {
    case LikelihoodKind::probit: {
      const double r = std::sqrt(1.0 + p);
      const double alpha = normal_cdf(fbar / r);
      const double alpha_c = normal_cdf(-fbar / r);
      st.z = alpha - alpha_c;
      // y is +-1 so the total second moment of y is 1: s = 1 - z^2.
      st.s = 4.0 * alpha * alpha_c;
      st.c = 2.0 * p / r * normal_pdf(fbar / r);
      break;
    }
    case LikelihoodKind::noisy_threshold: {
      const auto [beta, beta_c] = nt_beta(like.epsilon, fbar, p);
      const double sp = std::sqrt(p);
      st.z = beta - beta_c;
      st.s = 4.0 * beta * beta_c;
      st.c = 2.0 * (1.0 - 2.0 * like.epsilon) * sp * normal_pdf(fbar / sp);
      break;
    }
    case LikelihoodKind::logit: {
      const QuadratureRule& rule = cached_rule(like.quad_order);
      st.z = expect_1d([](double f) { return std::tanh(0.5 * f); }, fbar, p,
                       rule);
      st.c = expect_1d(
          [fbar](double f) { return (f - fbar) * std::tanh(0.5 * f); }, fbar,
          p, rule);
      st.s = (1.0 - st.z) * (1.0 + st.z);
      break;
    }
    case LikelihoodKind::gaussian: {
      st.z = like.slope * fbar + like.offset;
      st.s = like.slope * like.slope * p + like.noise;
      st.c = like.slope * p;
      break;
    }
  }
  return st;
}

TiltedMoments tilted_moments(const LikelihoodModel& like, double y,
                             double cavity_mean, double cavity_var) {
  require_label(like, y);
  if (!(cavity_var > 0.0) || !std::isfinite(cavity_var) ||
      !std::isfinite(cavity_mean)) {
    throw InvalidArgument("tilted_moments: cavity must have positive variance");
  }
  const double m = cavity_mean;
  const double v = cavity_var;
  TiltedMoments t;
  switch (like.kind) {
    case LikelihoodKind::probit: {
      const double r = std::sqrt(1.0 + v);
      const double z = y * m / r;
      const double h = normal_hazard(z);
      t.log_z = log_normal_cdf(z);
      t.mean = m + y * v * h / r;
      t.variance = v - v * v * h * (z + h) / (1.0 + v);
      break;
    }
    case LikelihoodKind::noisy_threshold: {
      const double eps = like.epsilon;
      const double s = std::sqrt(v);
      const double z = y * m / s;
      const double zhat = eps + (1.0 - 2.0 * eps) * normal_cdf(z);
      const double g = (1.0 - 2.0 * eps) * normal_pdf(z) / zhat;
      const double d1 = y * g / s;
      const double d2 = -g * z / v - d1 * d1;
      t.log_z = std::log(zhat);
      t.mean = m + v * d1;
      t.variance = v + v * v * d2;
      break;
    }
    case LikelihoodKind::logit: {
      const QuadratureRule& rule = cached_rule(like.quad_order);
      const double sd = std::sqrt(v);
      // Log-sum-exp over the nodes keeps tiny normalisers representable.
      std::vector<double> logw(rule.nodes.size());
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double f = m + sd * rule.nodes[k];
        logw[k] = std::log(rule.weights[k]) + log_sigmoid(y * f);
        top = std::max(top, logw[k]);
      }
      double z0 = 0.0, z1 = 0.0, z2 = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = sd * rule.nodes[k];
        const double w = std::exp(logw[k] - top);
        z0 += w;
        z1 += w * u;
        z2 += w * u * u;
      }
      const double mu = z1 / z0;
      t.log_z = top + std::log(z0);
      t.mean = m + mu;
      t.variance = z2 / z0 - mu * mu;
      break;
    }
    case LikelihoodKind::gaussian: {
      const double a = like.slope;
      const double prec = 1.0 / v + a * a / like.noise;
      t.variance = 1.0 / prec;
      t.mean = t.variance * (m / v + a * (y - like.offset) / like.noise);
      t.log_z = log_normal_pdf(y, a * m + like.offset, a * a * v + like.noise);
      break;
    }
  }
  if (!std::isfinite(t.mean) || !std::isfinite(t.variance) ||
      !std::isfinite(t.log_z)) {
    throw NumericFailure("tilted_moments: non-finite result for " + like.name());
  }
  return t;
}

LogLikDerivatives log_likelihood_derivatives(const LikelihoodModel& like,
                                             double y, double f) {
  require_label(like, y);
  switch (like.kind) {
    case LikelihoodKind::probit: {
      const double h = normal_hazard(y * f);
      return {y * h, -h * h - y * f * h};
    }
    case LikelihoodKind::logit: {
      const double pi = sigmoid(f);
      return {0.5 * (y + 1.0) - pi, -pi * (1.0 - pi)};
    }
    case LikelihoodKind::noisy_threshold:
      throw UnsupportedLikelihood(
          "noisy_threshold has zero likelihood gradient almost everywhere");
    case LikelihoodKind::gaussian: {
      const double a = like.slope;
      return {a * (y - a * f - like.offset) / like.noise,
              -a * a / like.noise};
    }
  }
  return {};
}

double expected_label(const LikelihoodModel& like, double mean, double var) {
  if (!(var >= 0.0) || !std::isfinite(mean)) {
    throw InvalidArgument("expected_label: bad predictive moments");
  }
  switch (like.kind) {
    case LikelihoodKind::probit: {
      const double x = mean / std::sqrt(1.0 + var);
      return normal_cdf(x) - normal_cdf(-x);
    }
    case LikelihoodKind::noisy_threshold: {
      if (var == 0.0) return cond_moments(like, mean).mean;
      const auto [beta, beta_c] = nt_beta(like.epsilon, mean, var);
      return beta - beta_c;
    }
    case LikelihoodKind::logit: {
      if (var == 0.0) return std::tanh(0.5 * mean);
      return expect_1d([](double f) { return std::tanh(0.5 * f); }, mean, var,
                       cached_rule(like.quad_order));
    }
    case LikelihoodKind::gaussian:
      return like.slope * mean + like.offset;
  }
  return 0.0;
}

}  // namespace gppl
