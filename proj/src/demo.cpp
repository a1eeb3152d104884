#include "gppl/demo.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace gppl {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

EpVariantResult run_ep_variant(const DemoProblem& p, const std::string& name,
                               bool parallel, std::vector<long> order,
                               int sweeps) {
  InferenceOptions opts;
  opts.max_iters = sweeps;
  opts.clamp_negative_sites = false;
  opts.stop_on_negative_cavity = true;
  opts.order = std::move(order);
  EpVariantResult out;
  out.name = name;
  try {
    out.report = parallel ? ep_parallel(p.prior, p.like, p.y, opts)
                          : ep_sequential(p.prior, p.like, p.y, opts);
  } catch (const InferenceError& e) {
    // A site update can leave the posterior indefinite; keep what was
    // recorded up to that point.
    if (e.report()) out.report = *e.report();
  }
  out.first_negative_cavity.resize(p.y.size());
  for (const EpEvent& ev : out.report.ep_events) {
    if (ev.kind != EpEventKind::negative_cavity) continue;
    auto& slot = out.first_negative_cavity[ev.site];
    if (!slot) slot = ev;
  }
  return out;
}

InferenceReport run_pl(const DemoProblem& p, bool parallel,
                       const DemoOptions& o) {
  InferenceOptions opts;
  opts.max_iters = o.pl_max_iters;
  opts.tol = o.pl_tol;
  return parallel ? pl_parallel(p.prior, p.like, p.y, opts)
                  : pl_sequential(p.prior, p.like, p.y, opts);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

void write_outputs(const DemoResult& r, const GridOracle2D& grid,
                   const DemoOptions& o, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  {
    auto out = open_out(dir / "contour.csv");
    out << "x,y,density\n";
    for (int i = 0; i < grid.resolution(); ++i) {
      for (int j = 0; j < grid.resolution(); ++j) {
        out << grid.x(i) << ',' << grid.y(j) << ',' << grid.density(i, j) << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "pl_iterates.csv");
    out << "algorithm,iteration,mean_1,mean_2\n";
    for (const auto* rep : {&r.ppl, &r.spl}) {
      const char* name = rep == &r.ppl ? "ppl" : "spl";
      for (std::size_t k = 0; k < rep->mean_history.size(); ++k) {
        out << name << ',' << k << ',' << rep->mean_history[k](0) << ','
            << rep->mean_history[k](1) << '\n';
      }
    }
  }
  {
    // Final PPL mean and its 3-sigma ellipse; the first row is the centre.
    auto out = open_out(dir / "pl_ellipse.csv");
    out << "point,x,y\n";
    const Vector& m = r.ppl.belief.mean;
    out << "mean," << m(0) << ',' << m(1) << '\n';
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r.ppl.belief.cov);
    const Matrix root =
        eig.eigenvectors() *
        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    for (int k = 0; k < o.ellipse_points; ++k) {
      const double t = 2.0 * std::numbers::pi * k / o.ellipse_points;
      Vector u(2);
      u << std::cos(t), std::sin(t);
      const Vector q = m + 3.0 * root * u;
      out << "ellipse," << q(0) << ',' << q(1) << '\n';
    }
  }
  {
    auto out = open_out(dir / "ep_diagnostics.csv");
    out << "variant,iteration,site,event,variance\n";
    for (const auto& v : r.ep) {
      for (const EpEvent& ev : v.report.ep_events) {
        out << v.name << ',' << ev.iteration << ',' << ev.site + 1 << ','
            << to_string(ev.kind) << ',' << ev.variance << '\n';
      }
      if (v.report.ep_events.empty()) out << v.name << ",,,none,\n";
    }
  }
}

}  // namespace

DemoProblem DemoProblem::standard() {
  DemoProblem p;
  p.prior.mean.resize(2);
  p.prior.mean << -0.5, -3.0;
  p.prior.cov.resize(2, 2);
  p.prior.cov << 1.0, 0.8, 0.8, 1.0;
  p.like = LikelihoodModel::noisy_threshold(0.01);
  p.y = Vector::Ones(2);
  return p;
}

std::optional<EpEvent> EpVariantResult::first_any() const {
  for (const EpEvent& ev : report.ep_events) {
    if (ev.kind == EpEventKind::negative_cavity) return ev;
  }
  return std::nullopt;
}

DemoResult run_synthetic_demo(const std::string& out_dir,
                              const DemoOptions& opts) {
  const auto t0 = Clock::now();
  DemoResult r;
  r.problem = DemoProblem::standard();
  const DemoProblem& p = r.problem;

  r.ep.push_back(run_ep_variant(p, "sep_12", false, {0, 1}, opts.ep_sweeps));
  r.ep.push_back(run_ep_variant(p, "sep_21", false, {1, 0}, opts.ep_sweeps));
  r.ep.push_back(run_ep_variant(p, "pep", true, {}, opts.ep_sweeps));
  r.seconds_ep = since(t0);

  r.ppl = run_pl(p, true, opts);
  r.spl = run_pl(p, false, opts);

  const GridOracle2D grid(p.prior, p.like, p.y, opts.grid);
  r.grid_mean = grid.mean();
  r.grid_cov = grid.cov();
  r.grid_log_evidence = grid.log_evidence();
  r.grid_modes = grid.modes();

  if (!out_dir.empty()) write_outputs(r, grid, opts, out_dir);
  r.seconds_total = since(t0);
  return r;
}

}  // namespace gppl
