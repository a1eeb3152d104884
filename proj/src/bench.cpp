#include "gppl/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace gppl {

namespace {

struct FoldTask {
  std::size_t cell = 0;
  int fold = 0;
};

struct FoldOutcome {
  CellStatus status = CellStatus::ok;
  double error = 0.0;
  double seconds = 0.0;
  std::string message;
};

const char* status_text(CellStatus s) {
  switch (s) {
    case CellStatus::ok:
      return "ok";
    case CellStatus::unsupported:
      return "unsupported";
    case CellStatus::failed:
      return "failed";
  }
  return "?";
}

std::string cell_text(const CellResult& c, double value, int precision) {
  if (c.status == CellStatus::unsupported) return "-";
  if (c.status == CellStatus::failed) return "fail";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << value;
  return os.str();
}

void write_table(const BenchmarkReport& report, std::ostream& out,
                 bool seconds) {
  std::vector<std::string> likes;
  std::vector<Engine> algs;
  for (const auto& c : report.cells) {
    if (std::find(likes.begin(), likes.end(), c.likelihood) == likes.end()) {
      likes.push_back(c.likelihood);
    }
    if (std::find(algs.begin(), algs.end(), c.algorithm) == algs.end()) {
      algs.push_back(c.algorithm);
    }
  }
  std::size_t like_w = 6;
  for (const auto& l : likes) like_w = std::max(like_w, l.size() + 2);
  std::vector<std::size_t> col_w;
  for (const auto& d : report.datasets) col_w.push_back(std::max<std::size_t>(9, d.size() + 2));

  const int precision = seconds ? 2 : 3;
  out << std::left << std::setw(static_cast<int>(like_w)) << "Like."
      << std::setw(8) << "Alg.";
  for (std::size_t j = 0; j < report.datasets.size(); ++j) {
    out << std::setw(static_cast<int>(col_w[j])) << report.datasets[j];
  }
  out << "Ave.\n";
  for (const auto& l : likes) {
    for (Engine a : algs) {
      out << std::setw(static_cast<int>(like_w)) << l << std::setw(8)
          << to_string(a);
      double sum = 0.0;
      int count = 0;
      CellResult worst;
      for (std::size_t j = 0; j < report.datasets.size(); ++j) {
        const CellResult* c = report.find(report.datasets[j], l, a);
        std::string text = "n/a";
        if (c) {
          const double v = seconds ? c->mean_seconds : c->mean_error;
          text = cell_text(*c, v, precision);
          if (c->status == CellStatus::ok) {
            sum += v;
            ++count;
          } else if (worst.status != CellStatus::failed) {
            worst.status = c->status;
          }
        }
        out << std::setw(static_cast<int>(col_w[j])) << text;
      }
      if (worst.status == CellStatus::ok && count == 0) worst.status = CellStatus::failed;
      out << cell_text(worst, count ? sum / count : 0.0, precision) << '\n';
    }
  }
}

}  // namespace

const CellResult* BenchmarkReport::find(const std::string& dataset,
                                        const std::string& like,
                                        Engine algorithm) const {
  for (const auto& c : cells) {
    if (c.dataset == dataset && c.likelihood == like && c.algorithm == algorithm) {
      return &c;
    }
  }
  return nullptr;
}

double fold_error(const Dataset& data, const FoldPlan& plan, int fold,
                  const LikelihoodModel& like, const FitConfig& fit_config) {
  const Dataset train_raw = data.subset(plan.train_indices(fold));
  const Dataset test_raw = data.subset(plan.test_indices(fold));
  const Standardizer st = Standardizer::fit(train_raw.X);
  const Dataset train = st.apply(train_raw);
  const Dataset test = st.apply(test_raw);

  const FittedModel model = fit(train.X, train.y, like, fit_config);
  const Vector labels = predict_labels(predict(model, test.X));
  long wrong = 0;
  for (long i = 0; i < labels.size(); ++i) wrong += labels(i) != test.y(i);
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  BenchmarkReport report;
  std::vector<Dataset> data;
  std::vector<FoldPlan> plans;
  for (const auto& spec : config.datasets) {
    data.push_back(load_csv(spec.path, spec.label));
    data.back().validate();
    plans.push_back(make_folds(data.back().size(), config.folds, config.seed));
    report.datasets.push_back(spec.name);
  }

  struct CellSpec {
    std::size_t dataset;
    LikelihoodModel like;
    Engine algorithm;
  };
  std::vector<CellSpec> specs;
  for (std::size_t d = 0; d < data.size(); ++d) {
    for (const auto& like : config.likelihoods) {
      for (Engine a : config.algorithms) specs.push_back({d, like, a});
    }
  }
  std::vector<FoldTask> tasks;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    for (int f = 0; f < config.folds; ++f) tasks.push_back({c, f});
  }
  std::vector<FoldOutcome> outcomes(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const CellSpec& cs = specs[tasks[t].cell];
      FoldOutcome& o = outcomes[t];
      if (cs.algorithm == Engine::laplace &&
          cs.like.kind == LikelihoodKind::noisy_threshold) {
        o.status = CellStatus::unsupported;
        o.message = "laplace does not support noisy_threshold";
        continue;
      }
      FitConfig fc;
      fc.engine = cs.algorithm;
      fc.quad_order = config.quad_order;
      fc.optimize = config.optimize;
      fc.bfgs.max_iters = config.bfgs_iters;
      fc.inference.max_iters = config.max_iters;
      fc.inference.clamp_negative_sites = config.clamp;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        o.error = fold_error(data[cs.dataset], plans[cs.dataset], tasks[t].fold,
                             cs.like, fc);
      } catch (const UnsupportedLikelihood& e) {
        o.status = CellStatus::unsupported;
        o.message = e.what();
      } catch (const std::exception& e) {
        o.status = CellStatus::failed;
        o.message = "fold " + std::to_string(tasks[t].fold) + ": " + e.what();
      }
      o.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    }
  };
  const int n_threads =
      static_cast<int>(std::min<std::size_t>(config.workers, tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t c = 0; c < specs.size(); ++c) {
    CellResult cell;
    cell.dataset = config.datasets[specs[c].dataset].name;
    cell.likelihood = specs[c].like.name();
    cell.algorithm = specs[c].algorithm;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].cell != c) continue;
      const FoldOutcome& o = outcomes[t];
      if (o.status != CellStatus::ok) {
        if (cell.status != CellStatus::failed) cell.status = o.status;
        if (cell.message.empty()) cell.message = o.message;
        continue;
      }
      cell.fold_errors.push_back(o.error);
      cell.fold_seconds.push_back(o.seconds);
    }
    if (cell.status == CellStatus::ok) {
      double e = 0.0, s = 0.0;
      for (double v : cell.fold_errors) e += v;
      for (double v : cell.fold_seconds) s += v;
      cell.mean_error = e / static_cast<double>(cell.fold_errors.size());
      cell.mean_seconds = s / static_cast<double>(cell.fold_seconds.size());
    } else {
      cell.mean_error = std::numeric_limits<double>::quiet_NaN();
      cell.mean_seconds = std::numeric_limits<double>::quiet_NaN();
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
  out << "dataset,likelihood,algorithm,mean_error,mean_seconds\n";
  for (const auto& c : report.cells) {
    out << c.dataset << ",\"" << c.likelihood << "\"," << to_string(c.algorithm)
        << ',';
    if (c.status == CellStatus::ok) {
      out << std::setprecision(6) << c.mean_error << ',' << std::fixed
          << std::setprecision(3) << c.mean_seconds << std::defaultfloat;
    } else {
      out << status_text(c.status) << ',';
    }
    out << '\n';
  }
}

void write_error_table(const BenchmarkReport& report, std::ostream& out) {
  write_table(report, out, false);
  for (const auto& c : report.cells) {
    if (c.status == CellStatus::failed) {
      out << "# " << c.dataset << '/' << c.likelihood << '/'
          << to_string(c.algorithm) << ": " << c.message << '\n';
    }
  }
}

void write_timing_table(const BenchmarkReport& report, std::ostream& out) {
  out << "# mean wall-clock seconds per fold (fit + predict)\n";
  write_table(report, out, true);
}

void write_benchmark_outputs(const BenchmarkReport& report,
                             const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream csv(dir / "report.csv");
  std::ofstream table(dir / "table.txt");
  std::ofstream timing(dir / "timing.txt");
  if (!csv || !table || !timing) {
    throw Error("cannot write benchmark outputs to " + out_dir);
  }
  write_report_csv(report, csv);
  write_error_table(report, table);
  write_timing_table(report, timing);
}

}  // namespace gppl
