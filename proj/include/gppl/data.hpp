#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gppl/numerics.hpp"

namespace gppl {

struct Dataset {
  Matrix X;
  Vector y;
  std::vector<std::string> feature_names;

  long size() const { return X.rows(); }
  long dims() const { return X.cols(); }
  /// Throws InvalidArgument unless y holds only +-1 and X is finite.
  void validate() const;
  /// Rows `idx` in the given order.
  Dataset subset(const std::vector<long>& idx) const;
};

enum class LabelMode {
  // Exactly two distinct labels; `positive` maps to +1.
  binary,
  // `positive` maps to +1, every other value to -1.
  one_vs_rest,
  // Numeric target; +1 iff strictly above the column median.
  above_median,
};

struct LabelSpec {
  std::string column;  // header name, or a 0-based index
  std::string positive;
  LabelMode mode = LabelMode::binary;
};

LabelMode parse_label_mode(const std::string& text);

/// Comma-separated file, optional header (detected by a non-numeric first
/// line). All columns except the label are numeric features.
Dataset load_csv(const std::string& path, const LabelSpec& label);

struct Standardizer {
  Vector means;
  Vector scales;

  static Standardizer fit(const Matrix& train);
  Matrix apply(const Matrix& x) const;
  Dataset apply(const Dataset& d) const;
};

struct FoldPlan {
  int k = 10;
  std::uint64_t seed = 0;
  std::vector<int> assignments;

  std::vector<long> train_indices(int fold) const;
  std::vector<long> test_indices(int fold) const;
};

/// Seeded shuffle, then round-robin assignment to k folds.
FoldPlan make_folds(long n, int k = 10, std::uint64_t seed = 0);

}  // namespace gppl
