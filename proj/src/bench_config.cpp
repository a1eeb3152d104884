#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gppl/bench.hpp"

namespace gppl {

namespace {

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Splits on commas that are not inside parentheses, so "logit(10),probit"
// yields two items.
std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!strip(cur).empty()) out.push_back(strip(cur));
  return out;
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ParseError("config: '" + key + "' expects an integer, got '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (datasets.empty()) throw InvalidArgument("config: no datasets");
  if (likelihoods.empty()) throw InvalidArgument("config: no likelihoods");
  if (algorithms.empty()) throw InvalidArgument("config: no algorithms");
  if (folds < 2) throw InvalidArgument("config: folds must be at least 2");
  if (max_iters < 1) throw InvalidArgument("config: max_iters must be positive");
  if (quad_order < 1 || quad_order > 64) {
    throw InvalidArgument("config: quad_order must be in 1..64");
  }
  if (workers < 1) throw InvalidArgument("config: workers must be positive");
  for (const auto& d : datasets) {
    if (d.path.empty()) throw InvalidArgument("config: dataset " + d.name + " has no path");
    if (d.label.column.empty()) {
      throw InvalidArgument("config: dataset " + d.name + " has no label column");
    }
  }
}

BenchmarkConfig parse_bench_config(std::istream& in, const std::string& base_dir) {
  BenchmarkConfig cfg;
  std::map<std::string, DatasetSpec> by_name;
  std::vector<std::string> order;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": missing '='");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));

    if (key.rfind("dataset.", 0) == 0) {
      const auto dot = key.find('.', 8);
      if (dot == std::string::npos) {
        throw ParseError("config line " + std::to_string(line_no) +
                         ": expected dataset.<name>.<field>");
      }
      const std::string name = key.substr(8, dot - 8);
      const std::string field = key.substr(dot + 1);
      if (!by_name.count(name)) {
        order.push_back(name);
        by_name[name].name = name;
      }
      DatasetSpec& ds = by_name[name];
      if (field == "path") {
        std::filesystem::path p(value);
        ds.path = p.is_absolute() ? value : (std::filesystem::path(base_dir) / p).string();
      } else if (field == "label") {
        ds.label.column = value;
      } else if (field == "positive") {
        ds.label.positive = value;
      } else if (field == "mode") {
        ds.label.mode = parse_label_mode(value);
      } else {
        throw ParseError("config line " + std::to_string(line_no) +
                         ": unknown dataset field '" + field + "'");
      }
    } else if (key == "likelihoods") {
      cfg.likelihoods.clear();
      for (const auto& item : split_list(value)) {
        cfg.likelihoods.push_back(parse_likelihood(item));
      }
    } else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (const auto& item : split_list(value)) {
        cfg.algorithms.push_back(parse_engine(item));
      }
    } else if (key == "folds") {
      cfg.folds = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "quad_order") {
      cfg.quad_order = static_cast<int>(parse_int(key, value));
    } else if (key == "clamp") {
      cfg.clamp = parse_bool(key, value);
    } else if (key == "optimize") {
      cfg.optimize = parse_bool(key, value);
    } else if (key == "bfgs_iters") {
      cfg.bfgs_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int(key, value));
    } else {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  for (const auto& name : order) cfg.datasets.push_back(by_name[name]);
  cfg.validate();
  return cfg;
}

BenchmarkConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_bench_config(in, dir.empty() ? "." : dir.string());
}

}  // namespace gppl
