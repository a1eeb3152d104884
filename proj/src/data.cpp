#include "gppl/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "gppl/errors.hpp"

namespace gppl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  std::string out = s.substr(a, b - a);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

void Dataset::validate() const {
  if (y.size() != X.rows()) throw InvalidArgument("dataset: label count mismatch");
  if (!X.allFinite()) throw InvalidArgument("dataset: non-finite feature");
  for (long i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) {
      throw InvalidArgument("dataset: labels must be +1 or -1");
    }
  }
}

Dataset Dataset::subset(const std::vector<long>& idx) const {
  Dataset out;
  out.feature_names = feature_names;
  out.X.resize(static_cast<long>(idx.size()), X.cols());
  out.y.resize(static_cast<long>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.X.row(static_cast<long>(r)) = X.row(idx[r]);
    out.y(static_cast<long>(r)) = y(idx[r]);
  }
  return out;
}

LabelMode parse_label_mode(const std::string& text) {
  if (text == "binary") return LabelMode::binary;
  if (text == "one_vs_rest") return LabelMode::one_vs_rest;
  if (text == "above_median") return LabelMode::above_median;
  throw ParseError("unknown label mode '" + text + "'");
}

Dataset load_csv(const std::string& path, const LabelSpec& label) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back(split_row(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ParseError(path + ": no data");

  // Header detection: the first line has a text cell where the second line
  // has a number, or it names the requested label column. String labels
  // alone do not make a header.
  const std::size_t width = rows.front().size();
  std::vector<std::string> header;
  long label_col = -1;
  double dummy = 0.0;
  const bool first_all_numeric = std::all_of(
      rows.front().begin(), rows.front().end(),
      [&](const std::string& c) { return parse_number(c, dummy); });
  bool has_header = false;
  if (!first_all_numeric && rows.size() > 1) {
    for (std::size_t j = 0; j < width && j < rows[1].size(); ++j) {
      if (!parse_number(rows[0][j], dummy) && parse_number(rows[1][j], dummy)) {
        has_header = true;
      }
    }
    for (const auto& c : rows[0]) {
      if (c == label.column && !parse_number(c, dummy)) has_header = true;
    }
  }
  if (has_header) {
    header = rows.front();
    rows.erase(rows.begin());
    line_numbers.erase(line_numbers.begin());
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == label.column) label_col = static_cast<long>(j);
    }
  }
  if (label_col < 0) {
    double idx = 0.0;
    if (!parse_number(label.column, idx) || idx < 0 || idx != std::floor(idx) ||
        idx >= static_cast<double>(width)) {
      throw ParseError(path + ": label column '" + label.column + "' not found");
    }
    label_col = static_cast<long>(idx);
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  const long n = static_cast<long>(rows.size());
  const long d = static_cast<long>(width) - 1;
  Dataset out;
  out.X.resize(n, d);
  out.y.resize(n);
  std::vector<std::string> labels(n);
  for (long i = 0; i < n; ++i) {
    const auto& r = rows[i];
    if (r.size() != width) {
      throw ParseError(path + ":" + std::to_string(line_numbers[i]) +
                       ": expected " + std::to_string(width) + " fields, got " +
                       std::to_string(r.size()));
    }
    long col = 0;
    for (long j = 0; j < static_cast<long>(width); ++j) {
      if (j == label_col) {
        labels[i] = r[j];
        continue;
      }
      double v = 0.0;
      if (!parse_number(r[j], v) || !std::isfinite(v)) {
        throw ParseError(path + ":" + std::to_string(line_numbers[i]) +
                         ": bad numeric value '" + r[j] + "'");
      }
      out.X(i, col++) = v;
    }
  }
  for (long j = 0; j < static_cast<long>(width); ++j) {
    if (j == label_col) continue;
    out.feature_names.push_back(has_header ? header[j] : "x" + std::to_string(j));
  }

  switch (label.mode) {
    case LabelMode::binary: {
      const std::set<std::string> distinct(labels.begin(), labels.end());
      if (distinct.size() > 2) {
        throw InvalidArgument(path + ": " + std::to_string(distinct.size()) +
                              " distinct labels; binary mode needs two");
      }
      for (long i = 0; i < n; ++i) out.y(i) = labels[i] == label.positive ? 1 : -1;
      break;
    }
    case LabelMode::one_vs_rest:
      for (long i = 0; i < n; ++i) out.y(i) = labels[i] == label.positive ? 1 : -1;
      break;
    case LabelMode::above_median: {
      std::vector<double> values(n);
      for (long i = 0; i < n; ++i) {
        if (!parse_number(labels[i], values[i])) {
          throw ParseError(path + ": non-numeric target '" + labels[i] + "'");
        }
      }
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      const double median = n % 2 ? sorted[n / 2]
                                  : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
      for (long i = 0; i < n; ++i) out.y(i) = values[i] > median ? 1 : -1;
      break;
    }
  }
  return out;
}

Standardizer Standardizer::fit(const Matrix& train) {
  if (train.rows() < 2) throw InvalidArgument("standardizer: need two rows");
  Standardizer s;
  const double n = static_cast<double>(train.rows());
  s.means = train.colwise().mean().transpose();
  s.scales.resize(train.cols());
  for (long j = 0; j < train.cols(); ++j) {
    const double var = (train.col(j).array() - s.means(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    // Constant columns keep scale 1.
    s.scales(j) = sd > 1e-12 * std::max(1.0, std::abs(s.means(j))) ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != means.size()) {
    throw InvalidArgument("standardizer: column count mismatch");
  }
  return ((x.rowwise() - means.transpose()).array().rowwise() /
          scales.transpose().array())
      .matrix();
}

Dataset Standardizer::apply(const Dataset& d) const {
  Dataset out = d;
  out.X = apply(d.X);
  return out;
}

std::vector<long> FoldPlan::train_indices(int fold) const {
  std::vector<long> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(static_cast<long>(i));
  }
  return out;
}

std::vector<long> FoldPlan::test_indices(int fold) const {
  std::vector<long> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(static_cast<long>(i));
  }
  return out;
}

FoldPlan make_folds(long n, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("make_folds: k must be at least 2");
  if (n < k) {
    throw InvalidArgument("make_folds: " + std::to_string(n) +
                          " points cannot fill " + std::to_string(k) + " folds");
  }
  // mt19937_64 output is fixed by the standard; the distributions are not,
  // so bounded draws are done here by rejection.
  std::mt19937_64 rng(seed);
  auto below = [&rng](std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    return r % bound;
  };
  std::vector<long> perm(n);
  for (long i = 0; i < n; ++i) perm[i] = i;
  for (long i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[below(static_cast<std::uint64_t>(i) + 1)]);
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  for (long r = 0; r < n; ++r) plan.assignments[perm[r]] = static_cast<int>(r % k);
  return plan;
}

}  // namespace gppl
