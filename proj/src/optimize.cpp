#include "gppl/optimize.hpp"

#include <cmath>
#include <limits>

namespace gppl {

namespace {

class CountingObjective {
 public:
  CountingObjective(const std::function<double(const Vector&)>& f,
                    BfgsResult& result)
      : f_(f), result_(result) {}

  double operator()(const Vector& x) {
    double v = std::numeric_limits<double>::infinity();
    try {
      v = f_(x);
    } catch (const Error&) {
      v = std::numeric_limits<double>::infinity();
    }
    ++result_.evaluations;
    if (!std::isfinite(v)) {
      ++result_.failed_evaluations;
      return std::numeric_limits<double>::infinity();
    }
    if (!has_best_ || v < result_.value) {
      has_best_ = true;
      result_.value = v;
      result_.x = x;
    }
    return v;
  }

  bool has_best() const { return has_best_; }

 private:
  const std::function<double(const Vector&)>& f_;
  BfgsResult& result_;
  bool has_best_ = false;
};

// Central differences, falling back to a one-sided difference when one of
// the probes fails. Returns false if a component cannot be estimated.
bool fd_gradient(CountingObjective& f, const Vector& x, double fx, double h,
                 Vector& g) {
  g.resize(x.size());
  for (long i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const double fp = f(xp);
    const double fm = f(xm);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g(i) = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g(i) = (fp - fx) / h;
    } else if (std::isfinite(fm)) {
      g(i) = (fx - fm) / h;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

BfgsResult minimize_bfgs(const std::function<double(const Vector&)>& objective,
                         const Vector& x0, const BfgsOptions& opts) {
  BfgsResult result;
  result.x = x0;
  CountingObjective f(objective, result);

  Vector x = x0;
  double fx = f(x);
  if (!std::isfinite(fx)) {
    throw FitFailure("minimize_bfgs: objective is not finite at the start point");
  }
  Vector g;
  if (!fd_gradient(f, x, fx, opts.fd_step, g)) return result;

  const long n = x.size();
  Matrix h_inv = Matrix::Identity(n, n);
  for (int it = 1; it <= opts.max_iters; ++it) {
    result.iterations = it;
    if (g.norm() < opts.grad_tol) {
      result.converged = true;
      break;
    }
    Vector p = -h_inv * g;
    if (!(g.dot(p) < 0.0)) {
      h_inv.setIdentity();
      p = -g;
    }
    if (p.norm() > opts.max_step) p *= opts.max_step / p.norm();
    const double slope = g.dot(p);

    double t = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Vector x_new;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      x_new = x + t * p;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    Vector g_new;
    if (!fd_gradient(f, x_new, f_new, opts.fd_step, g_new)) break;
    const Vector s = x_new - x;
    const Vector yk = g_new - g;
    const double sy = s.dot(yk);
    const double f_change = std::abs(fx - f_new);
    x = x_new;
    g = g_new;
    const double f_prev = fx;
    fx = f_new;
    if (sy > 1e-12 * s.norm() * yk.norm()) {
      const double rho = 1.0 / sy;
      const Matrix i_n = Matrix::Identity(n, n);
      h_inv = (i_n - rho * s * yk.transpose()) * h_inv *
                  (i_n - rho * yk * s.transpose()) +
              rho * s * s.transpose();
    }
    if (s.norm() < opts.step_tol ||
        f_change < opts.f_tol * (1.0 + std::abs(f_prev))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace gppl
