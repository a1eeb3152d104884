#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "gppl/data.hpp"

using namespace gppl;
using doctest::Approx;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("gppl_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("load_csv label mapping") {
  const auto p = write_temp("mf.csv", "1.0,2.0,M\n3.0,4.0,F\n5.0,6.5,M\n");
  const auto d = load_csv(p, {"2", "M", LabelMode::binary});
  REQUIRE(d.size() == 3);
  CHECK(d.dims() == 2);
  CHECK(d.y(0) == 1.0);
  CHECK(d.y(1) == -1.0);
  CHECK(d.y(2) == 1.0);
  CHECK(d.X(2, 1) == 6.5);

  const auto q = write_temp("01.csv", "x,y,label\n0.5,1,0\n0.1,2,1\n0.7,3,1\n");
  const auto e = load_csv(q, {"label", "1", LabelMode::binary});
  CHECK(e.feature_names == std::vector<std::string>{"x", "y"});
  CHECK(e.y(0) == -1.0);
  CHECK(e.y(1) == 1.0);
  e.validate();

  const auto r = write_temp("abc.csv", "1,a\n2,b\n3,c\n");
  CHECK_THROWS_AS(load_csv(r, {"1", "a", LabelMode::binary}), InvalidArgument);
  const auto ovr = load_csv(r, {"1", "b", LabelMode::one_vs_rest});
  CHECK(ovr.y(0) == -1.0);
  CHECK(ovr.y(1) == 1.0);
  CHECK(ovr.y(2) == -1.0);
}

TEST_CASE("load_csv header detection and errors") {
  // Label first, numeric header-less file.
  const auto p = write_temp("nohdr.csv", "1,0.5,0.25\n-1,0.1,0.2\n");
  const auto d = load_csv(p, {"0", "1", LabelMode::binary});
  CHECK(d.size() == 2);
  CHECK(d.X(0, 1) == 0.25);

  const auto h = write_temp("median.csv", "a,target\n1,10\n2,20\n3,30\n4,40\n");
  const auto m = load_csv(h, {"target", "", LabelMode::above_median});
  CHECK(m.y(0) == -1.0);
  CHECK(m.y(1) == -1.0);
  CHECK(m.y(2) == 1.0);
  CHECK(m.y(3) == 1.0);

  CHECK_THROWS_AS(load_csv(h, {"missing", "1", LabelMode::binary}), ParseError);
  const auto bad = write_temp("bad.csv", "1,2,A\n2,x,B\n");
  CHECK_THROWS_AS(load_csv(bad, {"2", "A", LabelMode::binary}), ParseError);
  const auto inf = write_temp("inf.csv", "1,inf,A\n2,3,B\n");
  CHECK_THROWS(load_csv(inf, {"2", "A", LabelMode::binary}));
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {"0", "1", LabelMode::binary}),
                  ParseError);
  CHECK_THROWS_AS(parse_label_mode("ordinal"), ParseError);
}

TEST_CASE("fixture file") {
  const auto d = load_csv(std::string(GPPL_TEST_DATA) + "/fixture.csv",
                          {"class", "pos", LabelMode::binary});
  CHECK(d.size() == 60);
  CHECK(d.dims() == 3);
  CHECK((d.y.array() == 1.0).count() == 35);
}

TEST_CASE("standardizer examples") {
  Matrix t(2, 1);
  t << 0, 2;
  const auto s = Standardizer::fit(t);
  CHECK(s.means(0) == 1.0);
  CHECK(s.scales(0) == 1.0);
  const Matrix z = s.apply(t);
  CHECK(z(0, 0) == -1.0);
  CHECK(z(1, 0) == 1.0);

  Matrix c(3, 1);
  c << 5, 5, 5;
  const auto sc = Standardizer::fit(c);
  CHECK(sc.scales(0) == 1.0);
  CHECK(sc.apply(c).norm() == 0.0);

  // Unseen rows use the training statistics.
  Matrix test(1, 1);
  test << 4;
  CHECK(s.apply(test)(0, 0) == 3.0);
  CHECK_THROWS_AS(s.apply(Matrix::Zero(1, 2)), InvalidArgument);
}

TEST_CASE("standardised training columns have zero mean and unit variance") {
  Matrix x(50, 4);
  for (int i = 0; i < 50; ++i) {
    x(i, 0) = i * 0.3 - 2.0;
    x(i, 1) = std::sin(i) * 1e4 + 3e5;
    x(i, 2) = (i % 7) * 1e-3;
    x(i, 3) = 2.5;
  }
  const Matrix z = Standardizer::fit(x).apply(x);
  for (int j = 0; j < 3; ++j) {
    const double mean = z.col(j).mean();
    const double var = (z.col(j).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-10);
  }
  CHECK(z.col(3).norm() == 0.0);
}

TEST_CASE("make_folds") {
  const auto a = make_folds(10, 10, 3);
  for (int f = 0; f < 10; ++f) CHECK(a.test_indices(f).size() == 1);

  const auto b = make_folds(11, 10, 3);
  std::multiset<std::size_t> sizes;
  for (int f = 0; f < 10; ++f) sizes.insert(b.test_indices(f).size());
  CHECK(sizes.count(2) == 1);
  CHECK(sizes.count(1) == 9);

  CHECK(make_folds(200, 10, 42).assignments == make_folds(200, 10, 42).assignments);
  CHECK(make_folds(200, 10, 42).assignments != make_folds(200, 10, 43).assignments);

  for (long n : {10L, 37L, 214L}) {
    const auto p = make_folds(n, 10, 9);
    std::set<long> seen;
    std::size_t lo = n, hi = 0;
    for (int f = 0; f < 10; ++f) {
      const auto test = p.test_indices(f);
      const auto train = p.train_indices(f);
      CHECK(test.size() + train.size() == static_cast<std::size_t>(n));
      lo = std::min(lo, test.size());
      hi = std::max(hi, test.size());
      for (long i : test) CHECK(seen.insert(i).second);
      std::set<long> tr(train.begin(), train.end());
      for (long i : test) CHECK(tr.count(i) == 0);
    }
    CHECK(seen.size() == static_cast<std::size_t>(n));
    CHECK(hi - lo <= 1);
  }
  CHECK_THROWS_AS(make_folds(9, 10, 0), InvalidArgument);
}

TEST_CASE("dataset validation and subsets") {
  Dataset d;
  d.X = Matrix::Zero(3, 1);
  d.X << 1, 2, 3;
  d.y = Vector::Ones(3);
  d.validate();
  const auto s = d.subset({2, 0});
  CHECK(s.X(0, 0) == 3.0);
  CHECK(s.X(1, 0) == 1.0);
  d.y(1) = 0.0;
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
}
