#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "impsense/clustering.hpp"

using namespace impsense;
using namespace impsense::clustering;

namespace {

MatrixXd blobs(int per_blob, double sep, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd x(2 * per_blob, 2);
  for (int i = 0; i < 2 * per_blob; ++i) {
    const double c = i < per_blob ? 0.0 : sep;
    x(i, 0) = c + n(rng);
    x(i, 1) = c + n(rng);
  }
  return x;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("cluster features average over posts") {
  ProfileRecord p;
  p.username = "u";
  p.follower_count = 7;
  similarity::CandidateAssessment a;
  a.best.sim_username = 0.5;
  a.msf = 2;
  a.lsf = 1;
  std::vector<PostRecord> posts(2);
  posts[0].like_count = 10;
  posts[1].like_count = 20;
  posts[0].caption = "abcd";
  posts[1].caption = "ab";
  posts[0].hashtags = {"xyz"};
  const auto f = build_cluster_features(p, a, posts);
  CHECK(f[kAvgReceivedLike] == 15.0);
  CHECK(f[kAvgCaptionLength] == 3.0);
  CHECK(f[kAvgHashtagLength] == 3.0);
  CHECK(f[kFollowerCount] == 7.0);
  CHECK(f[kSimUsername] == 0.5);
  CHECK(f[kMsf] == 2.0);
  const auto empty = build_cluster_features(p, a, {});
  CHECK(empty[kAvgReceivedLike] == 0.0);
  CHECK(empty[kAvgCaptionLength] == 0.0);
}

TEST_CASE("standardize") {
  MatrixXd two(2, 1);
  two << 0, 2;
  CHECK(standardize(two).z.isApprox((MatrixXd(2, 1) << -1, 1).finished()));
  MatrixXd constant = MatrixXd::Constant(3, 1, 5.0);
  const auto sc = standardize(constant);
  CHECK(sc.z.isZero());
  CHECK(sc.params.constant_columns.size() == 1);
  CHECK_THROWS_AS(standardize(MatrixXd::Ones(1, 3)), DataError);

  const MatrixXd r = MatrixXd::Random(10, 3) * 4.0 + MatrixXd::Constant(10, 3, 2.0);
  const MatrixXd z = standardize(r).z;
  for (int j = 0; j < 3; ++j) {
    const double mean = z.col(j).mean();
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::sqrt((z.col(j).array() - mean).square().mean()) == doctest::Approx(1.0));
  }
}

TEST_CASE("kmeans on two blobs agrees with nearest centroid") {
  const MatrixXd x = blobs(50, 10.0, 3);
  const auto m = kmeans(x, 2, 1);
  CHECK(m.assignments == oracles::nearest_centroid(x, m.centroids));
  for (int i = 1; i < 50; ++i) CHECK(m.assignments[i] == m.assignments[0]);
  for (int i = 51; i < 100; ++i) CHECK(m.assignments[i] == m.assignments[50]);
  CHECK(m.assignments[0] != m.assignments[50]);
}

TEST_CASE("kmeans basics") {
  const MatrixXd same = MatrixXd::Constant(6, 2, 1.5);
  CHECK(kmeans(same, 1, 0).wcss == 0.0);
  const MatrixXd x = blobs(30, 5.0, 9);
  CHECK(kmeans(x, 3, 42).assignments == kmeans(x, 3, 42).assignments);
  CHECK_THROWS_AS(kmeans(x, 61, 0), DataError);
  MatrixXd bad = x;
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(kmeans(bad, 2, 0), DataError);
}

TEST_CASE("lloyd never increases the objective") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MatrixXd x = MatrixXd::Random(40, 3);
    const auto m = kmeans(x, 4, s);
    for (std::size_t i = 1; i < m.wcss_history.size(); ++i)
      CHECK(m.wcss_history[i] <= m.wcss_history[i - 1] + 1e-12);
  }
}

TEST_CASE("elbow") {
  const MatrixXd x = blobs(100, 12.0, 4);
  const auto e = elbow_select(x, 1, 8, 7);
  CHECK(e.k_star == 2);
  for (std::size_t i = 1; i < e.wcss.size(); ++i) CHECK(e.wcss[i] <= e.wcss[i - 1] + 1e-9);
  CHECK_THROWS_AS(elbow_select(x, 1, 2, 7), DataError);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  MatrixXd g(200, 2);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = n(rng);
  const auto single = elbow_select(g, 1, 8, 7);
  CHECK(single.k_star >= 1);
  CHECK(single.k_star <= 8);
}

TEST_CASE("labeling follows the centroids") {
  ClusterModel<double> m;
  m.k = 2;
  m.centroids = MatrixXd::Zero(2, kNumClusterFeatures);
  SUBCASE("follower count") {
    m.centroids(1, kFollowerCount) = 1.0;
    label_clusters(m);
    CHECK(m.labels[1] == PostClass::fan);
    CHECK(m.labels[0] == PostClass::bot);
  }
  SUBCASE("photo similarity") {
    m.centroids(0, kSimPhoto) = 0.71;
    m.centroids(1, kSimPhoto) = 0.17;
    label_clusters(m);
    CHECK(m.labels[0] == PostClass::fan);
    m.centroids.row(0).swap(m.centroids.row(1));
    label_clusters(m);
    CHECK(m.labels[1] == PostClass::fan);
  }
  SUBCASE("needs two clusters") {
    m.k = 3;
    CHECK_THROWS_AS(label_clusters(m), DataError);
  }
}

TEST_CASE("outlier flags") {
  MatrixXd x(5, 1);
  x << 0, 0.1, -0.1, 0.05, 10;
  ClusterModel<double> m;
  m.k = 1;
  m.centroids = MatrixXd::Zero(1, 1);
  const auto r = point_reports(m, x, 3.0);
  CHECK(r[4].outlier);
  for (int i = 0; i < 4; ++i) CHECK_FALSE(r[i].outlier);
}

}
