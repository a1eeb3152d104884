#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "gppl/model.hpp"

namespace gppl {

namespace {

constexpr const char* kMagic = "gppl-model";
constexpr int kVersion = 1;

void write_block(std::ostream& out, const char* name, const Matrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string next_line() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    fail("unexpected end of file");
  }

  Matrix block(const std::string& name, long rows, long cols) {
    std::istringstream head(next_line());
    std::string got;
    long r = -1, c = -1;
    head >> got >> r >> c;
    if (got != name) fail("expected block '" + name + "', found '" + got + "'");
    if (r != rows || c != cols) {
      fail("block '" + name + "' has shape " + std::to_string(r) + "x" +
           std::to_string(c) + ", expected " + std::to_string(rows) + "x" +
           std::to_string(cols));
    }
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      std::istringstream row(next_line());
      for (long j = 0; j < cols; ++j) {
        if (!(row >> m(i, j))) fail("bad number in block '" + name + "'");
      }
      std::string extra;
      if (row >> extra) fail("too many values in block '" + name + "'");
    }
    return m;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("model file line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

double to_double(const Reader& r, const std::string& key,
                 const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  r.fail("bad value for " + key + ": '" + text + "'");
}

}  // namespace

void save_model(const FittedModel& model, std::ostream& out) {
  const long n = model.X_train.rows();
  const long d = model.X_train.cols();
  out << std::setprecision(17);
  out << kMagic << ' ' << kVersion << '\n';
  out << "log_sigma1_sq " << model.hp.log_sigma1_sq << '\n';
  out << "log_ell " << model.hp.log_ell << '\n';
  out << "sigma2_sq " << model.hp.sigma2_sq << '\n';
  out << "jitter_on_test " << (model.hp.jitter_on_test ? 1 : 0) << '\n';
  out << "likelihood " << model.like.name() << '\n';
  out << "engine " << to_string(model.engine) << '\n';
  out << "log_marginal " << model.log_marginal << '\n';
  out << "n " << n << '\n';
  out << "d " << d << '\n';
  write_block(out, "X_train", model.X_train);
  write_block(out, "y_train", model.y_train);
  write_block(out, "A", model.sites.A);
  write_block(out, "b", model.sites.b);
  write_block(out, "Omega", model.sites.Omega);
  write_block(out, "belief_mean", model.belief.mean);
  write_block(out, "belief_cov", model.belief.cov);
  out << "end\n";
  if (!out) throw Error("save_model: write failed");
}

FittedModel load_model(std::istream& in) {
  Reader r(in);
  {
    std::istringstream head(r.next_line());
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kMagic) r.fail("not a gppl model file");
    if (version != kVersion) {
      r.fail("unsupported format version " + std::to_string(version));
    }
  }
  static const char* keys[] = {"log_sigma1_sq", "log_ell",      "sigma2_sq",
                               "jitter_on_test", "likelihood",  "engine",
                               "log_marginal",  "n",            "d"};
  std::map<std::string, std::string> header;
  for (const char* key : keys) {
    const std::string line = r.next_line();
    const auto sp = line.find(' ');
    if (line.substr(0, sp) != key) {
      r.fail(std::string("expected key '") + key + "'");
    }
    header[key] = sp == std::string::npos ? "" : line.substr(sp + 1);
  }

  FittedModel model;
  model.hp.log_sigma1_sq = to_double(r, "log_sigma1_sq", header["log_sigma1_sq"]);
  model.hp.log_ell = to_double(r, "log_ell", header["log_ell"]);
  model.hp.sigma2_sq = to_double(r, "sigma2_sq", header["sigma2_sq"]);
  model.hp.jitter_on_test = header["jitter_on_test"] == "1";
  model.log_marginal = to_double(r, "log_marginal", header["log_marginal"]);
  try {
    model.like = parse_likelihood(header["likelihood"]);
    model.engine = parse_engine(header["engine"]);
    model.hp.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  const double nd = to_double(r, "n", header["n"]);
  const double dd = to_double(r, "d", header["d"]);
  if (nd < 1 || dd < 1 || nd != std::floor(nd) || dd != std::floor(dd)) {
    r.fail("bad dimensions");
  }
  const long n = static_cast<long>(nd);
  const long d = static_cast<long>(dd);

  model.X_train = r.block("X_train", n, d);
  model.y_train = r.block("y_train", n, 1);
  model.sites.A = r.block("A", n, 1);
  model.sites.b = r.block("b", n, 1);
  model.sites.Omega = r.block("Omega", n, 1);
  model.belief.mean = r.block("belief_mean", n, 1);
  model.belief.cov = r.block("belief_cov", n, n);
  if (r.next_line() != "end") r.fail("missing 'end'");
  try {
    model.sites.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return model;
}

void save_model(const FittedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  save_model(model, out);
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_model(in);
}

}  // namespace gppl
