#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gppl/data.hpp"
#include "gppl/model.hpp"

namespace gppl {

struct DatasetSpec {
  std::string name;
  std::string path;
  LabelSpec label;
};

struct BenchmarkConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<LikelihoodModel> likelihoods;
  std::vector<Engine> algorithms;
  int folds = 10;
  std::uint64_t seed = 0;
  int max_iters = 10;
  int quad_order = 10;
  bool clamp = true;
  bool optimize = true;
  int bfgs_iters = 50;
  int workers = 1;

  void validate() const;
};

/// Flat `key = value` text, `#` comments. Relative dataset paths are taken
/// relative to the config file's directory. See README for the keys.
BenchmarkConfig parse_bench_config(std::istream& in,
                                   const std::string& base_dir = ".");
BenchmarkConfig load_bench_config(const std::string& path);

enum class CellStatus { ok, unsupported, failed };

struct CellResult {
  std::string dataset;
  std::string likelihood;
  Engine algorithm = Engine::ppl;
  CellStatus status = CellStatus::ok;
  std::vector<double> fold_errors;
  std::vector<double> fold_seconds;
  double mean_error = 0.0;
  double mean_seconds = 0.0;
  std::string message;  // first failure, if any
};

struct BenchmarkReport {
  std::vector<std::string> datasets;
  std::vector<CellResult> cells;

  const CellResult* find(const std::string& dataset, const std::string& like,
                         Engine algorithm) const;
};

/// One fold: standardise on the training part, fit, predict, error rate.
/// Throws on failure.
double fold_error(const Dataset& data, const FoldPlan& plan, int fold,
                  const LikelihoodModel& like, const FitConfig& fit_config);

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// dataset,likelihood,algorithm,mean_error,mean_seconds
void write_report_csv(const BenchmarkReport& report, std::ostream& out);
/// Errors only, one row per (likelihood, algorithm), one column per dataset
/// plus the average. Byte-stable for a fixed config and seed.
void write_error_table(const BenchmarkReport& report, std::ostream& out);
void write_timing_table(const BenchmarkReport& report, std::ostream& out);

/// Writes report.csv, table.txt and timing.txt into out_dir.
void write_benchmark_outputs(const BenchmarkReport& report,
                             const std::string& out_dir);

}  // namespace gppl
