// Independent reference computations for tests. Deliberately naive.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impsense/clustering.hpp"

namespace oracles {

// ASCII-only bigram set after dropping '_', '.', whitespace and lowercasing.
inline std::set<std::string> bigrams(const std::string& s) {
  std::string t;
  for (char c : s) {
    if (c == '_' || c == '.' || std::isspace(static_cast<unsigned char>(c))) continue;
    t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::set<std::string> out;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) out.insert(t.substr(i, 2));
  return out;
}

inline std::size_t bigram_count(const std::string& s) { return bigrams(s).size(); }

inline double bigram_cosine(const std::string& a, const std::string& b) {
  const auto x = bigrams(a), y = bigrams(b);
  if (x.empty() || y.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& g : x) shared += y.count(g);
  return static_cast<double>(shared) / std::sqrt(static_cast<double>(x.size() * y.size()));
}

// Nearest centroid by squared distance, ties to the lower index.
inline std::vector<int> nearest_centroid(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = INFINITY;
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
      double d = 0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) d += (x(i, j) - c(k, j)) * (x(i, j) - c(k, j));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    out.push_back(best);
  }
  return out;
}

// Centroid with the larger follower + photo + username composite.
inline int fan_centroid(const Eigen::MatrixXd& centroids) {
  namespace cl = impsense::clustering;
  double score[2];
  for (int c = 0; c < 2; ++c)
    score[c] = centroids(c, cl::kFollowerCount) + centroids(c, cl::kSimPhoto) + centroids(c, cl::kSimUsername);
  return score[1] > score[0] ? 1 : 0;
}

inline double segment_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 == 0 ? 0.0 : std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// True when p lies on a segment from some row of `minority` to one of its k
// nearest other rows.
inline bool on_smote_segment(const Eigen::MatrixXd& minority, const Eigen::VectorXd& p, int k, double tol) {
  const Eigen::Index n = minority.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, Eigen::Index>> d;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) d.emplace_back((minority.row(i) - minority.row(j)).squaredNorm(), j);
    std::sort(d.begin(), d.end());
    for (std::size_t t = 0; t < std::min<std::size_t>(static_cast<std::size_t>(k), d.size()); ++t)
      if (segment_distance(p, minority.row(i).transpose(), minority.row(d[t].second).transpose()) <= tol) return true;
  }
  return false;
}

// Twenty predictions with hand-computed scores. Confusion, row = truth:
//   bot     [5 1 1]
//   fan     [2 4 1]
//   genuine [0 1 5]
struct MetricsFixture {
  std::vector<int> labels, predictions;
  std::array<std::array<long, 3>, 3> confusion;
  double accuracy;
  std::array<double, 3> precision, recall, f1;
  double macro_precision, macro_recall, macro_f1;
};

inline MetricsFixture metrics_fixture() {
  MetricsFixture f;
  f.confusion = {{{5, 1, 1}, {2, 4, 1}, {0, 1, 5}}};
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p)
      for (long n = 0; n < f.confusion[t][p]; ++n) {
        f.labels.push_back(t);
        f.predictions.push_back(p);
      }
  f.accuracy = 14.0 / 20.0;
  f.precision = {5.0 / 7.0, 4.0 / 6.0, 5.0 / 7.0};
  f.recall = {5.0 / 7.0, 4.0 / 7.0, 5.0 / 6.0};
  f.f1 = {5.0 / 7.0, 8.0 / 13.0, 10.0 / 13.0};
  f.macro_precision = 44.0 / 63.0;
  f.macro_recall = 89.0 / 126.0;
  f.macro_f1 = 191.0 / 273.0;
  return f;
}

}  // namespace oracles
