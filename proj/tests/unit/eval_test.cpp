#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "impsense/eval.hpp"
#include "impsense/forest.hpp"

using namespace impsense;
using namespace impsense::eval;

namespace {

std::vector<int> random_labels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i < 6 ? static_cast<int>(i % 3) : static_cast<int>(rng() % 3);
  return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("split") {
  std::vector<int> balanced;
  for (int i = 0; i < 100; ++i) balanced.push_back(i % 3);
  const auto s = split(balanced, 0.75, 1);
  CHECK(s.train.size() == 75);
  CHECK(s.test.size() == 25);
  std::array<int, 3> per{};
  for (auto i : s.train) ++per[static_cast<std::size_t>(balanced[i])];
  for (int c = 0; c < 3; ++c) CHECK(std::abs(per[c] - 0.75 * (c == 0 ? 34 : 33)) < 1.0);
  const auto again = split(balanced, 0.75, 1);
  CHECK(again.train == s.train);
  std::vector<int> four;
  for (int i = 0; i < 100; ++i) four.push_back(0);
  CHECK(split(four, 0.75, 3).train.size() == 75);
  CHECK_THROWS_AS(split(std::vector<int>{0, 0, 1}, 0.75, 0), DataError);
}

TEST_CASE("split and kfold are exact partitions") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto labels = random_labels(30 + seed * 3, seed);
    const auto s = split(labels, 0.75, seed);
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < labels.size(); ++i) CHECK(all[i] == i);

    const auto folds = kfold(labels, 10, seed);
    std::vector<std::size_t> val;
    for (const auto& f : folds) {
      val.insert(val.end(), f.validation.begin(), f.validation.end());
      CHECK(f.train.size() + f.validation.size() == labels.size());
      std::set<std::size_t> t(f.train.begin(), f.train.end());
      for (auto v : f.validation) CHECK(t.count(v) == 0);
    }
    std::sort(val.begin(), val.end());
    for (std::size_t i = 0; i < labels.size(); ++i) CHECK(val[i] == i);
  }
}

TEST_CASE("kfold sizes") {
  const auto twenty = kfold(random_labels(20, 1), 10, 1);
  for (const auto& f : twenty) CHECK(f.validation.size() == 2);
  const auto odd = kfold(random_labels(23, 2), 10, 2);
  std::size_t lo = 99, hi = 0;
  for (const auto& f : odd) {
    lo = std::min(lo, f.validation.size());
    hi = std::max(hi, f.validation.size());
  }
  CHECK(lo >= 2);
  CHECK(hi <= 3);
  CHECK(hi - lo <= 1);
  CHECK_THROWS_AS(kfold(random_labels(9, 3), 10, 0), DataError);
}

TEST_CASE("metrics") {
  const std::vector<int> y{0, 1, 2, 0, 1, 2};
  const auto perfect = metrics(y, y);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);

  const std::vector<int> zeros(6, 0);
  const auto flat = metrics(zeros, y);
  CHECK(flat.accuracy == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(flat.warnings.empty());

  const auto f = oracles::metrics_fixture();
  const auto m = metrics(f.predictions, f.labels);
  CHECK(m.accuracy == doctest::Approx(f.accuracy));
  for (int c = 0; c < 3; ++c) {
    CHECK(m.precision[c] == doctest::Approx(f.precision[c]));
    CHECK(m.recall[c] == doctest::Approx(f.recall[c]));
    CHECK(m.f1[c] == doctest::Approx(f.f1[c]));
    CHECK(m.confusion.row(c).sum() == m.support[c]);
    for (int p = 0; p < 3; ++p) CHECK(m.confusion(c, p) == f.confusion[c][p]);
  }
  CHECK(m.macro_precision == doctest::Approx(f.macro_precision));
  CHECK(m.macro_recall == doctest::Approx(f.macro_recall));
  CHECK(m.macro_f1 == doctest::Approx(f.macro_f1));
  CHECK(m.accuracy == doctest::Approx(static_cast<double>(m.confusion.trace()) / 20.0));

  CHECK_THROWS_AS(metrics(std::vector<int>{0}, y), DataError);
}

TEST_CASE("summarize") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("tfidf") {
  const auto one = Tfidf::fit(std::vector<std::string>{"a a b"});
  const MatrixXd x = one.transform(std::vector<std::string>{"a a b"});
  const double a = x(0, one.vocabulary().id("a") - 1), b = x(0, one.vocabulary().id("b") - 1);
  CHECK(a / b == doctest::Approx(2.0));
  CHECK(x.row(0).norm() == doctest::Approx(1.0));

  const std::vector<std::string> corpus{"x y", "x z z", "x"};
  const auto t = Tfidf::fit(corpus);
  CHECK(t.idf()(t.vocabulary().id("x") - 1) == doctest::Approx(1.0));
  const MatrixXd m = t.transform(std::vector<std::string>{"x y z", "", "unseen"});
  CHECK(m.row(0).norm() == doctest::Approx(1.0));
  CHECK(m.row(1).norm() == 0.0);
  CHECK(m.row(2).norm() == 0.0);
  CHECK_THROWS_AS(Tfidf::fit(std::vector<std::string>{}), DataError);
}

TEST_CASE("random forest") {
  MatrixXd x(60, 1);
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    x(i, 0) = i;
    y.push_back(i / 20);
  }
  ForestOptions o;
  o.trees = 15;
  const auto m = forest_train(x, y, o, 3);
  CHECK(forest_predict(m, x) == y);
  CHECK(forest_predict(forest_train(x, y, o, 3), x) == forest_predict(m, x));

  o.trees = 1;
  const auto single = forest_train(MatrixXd::Random(30, 4), random_labels(30, 1), o, 4);
  const MatrixXd q = MatrixXd::Random(10, 4);
  const auto votes = forest_predict(single, q);
  for (Eigen::Index i = 0; i < q.rows(); ++i) CHECK(votes[static_cast<std::size_t>(i)] == single.trees[0].predict(q.row(i)));

  o.trees = 9;
  auto many = forest_train(MatrixXd::Random(40, 3), random_labels(40, 5), o, 6);
  const auto before = forest_predict(many, q.leftCols(3));
  std::reverse(many.trees.begin(), many.trees.end());
  CHECK(forest_predict(many, q.leftCols(3)) == before);

  const auto constant = forest_train(MatrixXd::Random(5, 2), std::vector<int>(5, 2), o, 1);
  CHECK_FALSE(constant.warnings.empty());
  for (int p : forest_predict(constant, MatrixXd::Random(3, 2))) CHECK(p == 2);
}

}
