// gppl: command-line front end for benchmarking, the EP failure demo, and
// fitting/predicting with saved models.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "gppl/bench.hpp"
#include "gppl/data.hpp"
#include "gppl/demo.hpp"
#include "gppl/model.hpp"

namespace {

struct DataArgs {
  std::string path;
  std::string label;
  std::string positive;
  std::string mode = "binary";

  gppl::Dataset load() const {
    gppl::LabelSpec spec{label, positive, gppl::parse_label_mode(mode)};
    return gppl::load_csv(path, spec);
  }
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.path, "CSV file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--label", a.label, "label column (header name or 0-based index)")
      ->required();
  cmd->add_option("--positive", a.positive, "label value mapped to +1");
  cmd->add_option("--mode", a.mode, "binary | one_vs_rest | above_median");
}

int run_bench(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::optional<int> workers) {
  gppl::BenchmarkConfig cfg = gppl::load_bench_config(config_path);
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  const gppl::BenchmarkReport report = gppl::run_benchmark(cfg);
  gppl::write_benchmark_outputs(report, out_dir);
  gppl::write_error_table(report, std::cout);
  int failed = 0;
  for (const auto& c : report.cells) failed += c.status == gppl::CellStatus::failed;
  if (failed) std::cerr << failed << " cell(s) failed; see table.txt\n";
  return 0;
}

int run_demo(const std::string& out_dir) {
  const gppl::DemoResult r = gppl::run_synthetic_demo(out_dir);
  std::cout << std::setprecision(6);
  std::cout << "first negative cavity variance per EP variant:\n";
  for (const auto& v : r.ep) {
    std::cout << "  " << std::left << std::setw(8) << v.name;
    if (const auto ev = v.first_any()) {
      std::cout << "site " << ev->site + 1 << ", iteration " << ev->iteration
                << ": " << ev->variance << '\n';
    } else {
      std::cout << "none\n";
    }
  }
  const auto& m = r.ppl.belief.mean;
  std::cout << "PPL fixed point: (" << m(0) << ", " << m(1) << ") after "
            << r.ppl.iterations_run << " iterations\n";
  const auto& s = r.spl.belief.mean;
  std::cout << "SPL fixed point: (" << s(0) << ", " << s(1) << ") after "
            << r.spl.iterations_run << " sweeps\n";
  for (std::size_t k = 0; k < std::min<std::size_t>(2, r.grid_modes.size()); ++k) {
    const auto& loc = r.grid_modes[k].location;
    std::cout << "grid mode " << k + 1 << ": (" << loc(0) << ", " << loc(1)
              << "), density " << r.grid_modes[k].density << '\n';
  }
  std::cout << "outputs written to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process classification with posterior linearisation"};
  app.require_subcommand(1);

  std::string config_path, bench_out = "bench_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  auto* bench = app.add_subcommand("bench", "cross-validated benchmark");
  bench->add_option("--config", config_path, "benchmark config file")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--seed", seed, "override the fold seed");
  bench->add_option("--workers", workers, "override the worker count");

  std::string demo_out = "demo_out";
  auto* demo = app.add_subcommand("demo-ep-failure",
                                  "two-point instance where EP fails");
  demo->add_option("--out", demo_out, "output directory");

  DataArgs fit_data;
  std::string like_name = "probit", engine_name = "ppl", model_out;
  bool no_optimize = false;
  int max_iters = 10;
  auto* fitc = app.add_subcommand("fit", "fit a model and save it");
  add_data_options(fitc, fit_data);
  fitc->add_option("--likelihood", like_name,
                   "probit | logit(order) | noisy_threshold(eps)");
  fitc->add_option("--engine", engine_name, "laplace | pep | sep | ppl | spl");
  fitc->add_option("--max-iters", max_iters, "inference iterations per evaluation");
  fitc->add_flag("--no-optimize", no_optimize,
                 "keep the initial hyperparameters");
  fitc->add_option("--model", model_out, "model file to write")->required();

  DataArgs pred_data;
  std::string model_in, pred_out;
  auto* pred = app.add_subcommand("predict", "predict with a saved model");
  add_data_options(pred, pred_data);
  pred->add_option("--model", model_in, "model file")->required()->check(CLI::ExistingFile);
  pred->add_option("--out", pred_out, "predictions CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return run_bench(config_path, bench_out, seed, workers);
    if (*demo) return run_demo(demo_out);
    if (*fitc) {
      const gppl::Dataset d = fit_data.load();
      d.validate();
      gppl::FitConfig cfg;
      cfg.engine = gppl::parse_engine(engine_name);
      cfg.optimize = !no_optimize;
      cfg.inference.max_iters = max_iters;
      const gppl::FittedModel model =
          gppl::fit(d.X, d.y, gppl::parse_likelihood(like_name), cfg);
      gppl::save_model(model, model_out);
      std::cout << std::setprecision(8) << "log_sigma1_sq " << model.hp.log_sigma1_sq
                << "\nlog_ell " << model.hp.log_ell << "\nlog_marginal "
                << model.log_marginal << "\nobjective_evals " << model.objective_evals
                << " (" << model.failed_evals << " failed)\n";
      return 0;
    }
    if (*pred) {
      const gppl::FittedModel model = gppl::load_model(model_in);
      const gppl::Dataset d = pred_data.load();
      const gppl::Prediction p = gppl::predict(model, d.X);
      const gppl::Vector labels = gppl::predict_labels(p);
      std::ofstream file;
      if (!pred_out.empty()) {
        file.open(pred_out);
        if (!file) throw gppl::Error("cannot write " + pred_out);
      }
      std::ostream& out = pred_out.empty() ? std::cout : file;
      out << std::setprecision(10)
          << "latent_mean,latent_var,prob_positive,label,true_label\n";
      long wrong = 0;
      for (long i = 0; i < labels.size(); ++i) {
        out << p.latent_mean(i) << ',' << p.latent_var(i) << ','
            << p.prob_positive(i) << ',' << labels(i) << ',' << d.y(i) << '\n';
        wrong += labels(i) != d.y(i);
      }
      std::cerr << "error rate " << static_cast<double>(wrong) / labels.size()
                << " on " << labels.size() << " rows\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "gppl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
