#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impsense/common.hpp"
#include "impsense/similarity.hpp"

namespace impsense::clustering {

inline constexpr std::size_t kNumClusterFeatures = 17;

/// Column order of the clustering feature matrix.
enum ClusterFeature : std::size_t {
  kSimUsername = 0,
  kSimFullName,
  kSimBiography,
  kSimPhoto,
  kHasExternalUrl,
  kMsf,
  kLsf,
  kAvgReceivedLike,
  kAvgHashtagLength,
  kAvgCaptionLength,
  kAvgReceivedComment,
  kAccountAgeDays,
  kFollowerCount,
  kFolloweeCount,
  kMediaCount,
  kIsPrivate,
  kIsVerified,
};

inline constexpr std::array<std::string_view, kNumClusterFeatures> kClusterFeatureNames{
    "sim_username",       "sim_full_name",      "sim_biography",        "sim_photo",
    "has_external_url",   "msf",                "lsf",                  "avg_received_like",
    "avg_hashtag_length", "avg_caption_length", "avg_received_comment", "account_age_days",
    "follower_count",     "followee_count",     "media_count",          "is_private",
    "is_verified"};

using ClusterFeatureVector = std::array<double, kNumClusterFeatures>;

/// Post-derived columns are means over `posts` (0 for an empty list).
/// avg_hashtag_length is the mean hashtag length in characters; avg_caption_length
/// the mean caption length in codepoints.
ClusterFeatureVector build_cluster_features(const ProfileRecord& profile,
                                            const similarity::CandidateAssessment& assessment,
                                            std::span<const PostRecord> posts);

// ---------------------------------------------------------------- standardize

template <typename Scalar>
struct Standardization {
  Vector<Scalar> means;
  Vector<Scalar> stds;  // population std; 1 for constant columns
  std::vector<Eigen::Index> constant_columns;

  template <typename Derived>
  Matrix<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    if (x.cols() != means.size()) throw DataError("standardization dimension mismatch");
    return (x.rowwise() - means.transpose()).array().rowwise() / stds.transpose().array();
  }
};

template <typename Scalar>
struct Standardized {
  Matrix<Scalar> z;
  Standardization<Scalar> params;
};

/// Column-wise z-score with population standard deviation.
template <typename Derived>
Standardized<typename Derived::Scalar> standardize(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.rows() < 2) throw DataError("standardize needs at least two rows");
  if (!x.allFinite()) throw DataError("standardize input contains non-finite values");
  Standardized<Scalar> out;
  const Scalar n = static_cast<Scalar>(x.rows());
  out.params.means = x.colwise().sum().transpose() / n;
  const Matrix<Scalar> centered = x.rowwise() - out.params.means.transpose();
  out.params.stds = (centered.array().square().colwise().sum() / n).sqrt().transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Scalar scale = std::max<Scalar>(Scalar(1), std::abs(out.params.means(j)));
    if (out.params.stds(j) <= std::numeric_limits<Scalar>::epsilon() * scale * Scalar(16)) {
      out.params.stds(j) = Scalar(1);
      out.params.constant_columns.push_back(j);
    }
  }
  out.z = out.params.apply(x);
  for (Eigen::Index j : out.params.constant_columns) out.z.col(j).setZero();
  return out;
}

// ---------------------------------------------------------------- k-means

template <typename Scalar>
struct ClusterModel {
  int k = 0;
  Matrix<Scalar> centroids;  // k × d
  std::vector<int> assignments;
  std::vector<Scalar> wcss_history;  // one entry per assignment step
  Scalar wcss = 0;
  int iterations = 0;
  bool converged = false;
  Standardization<Scalar> scaling;  // set when fitted through fit_clusters
  std::vector<PostClass> labels;    // per cluster, filled by label_clusters
  std::vector<std::string> warnings;
};

struct KMeansOptions {
  int max_iters = 300;
  double tol = 1e-6;
};

namespace detail {

// Nearest centroid per row, ties to the lowest index. Returns the WCSS.
template <typename Scalar>
Scalar assign(const Matrix<Scalar>& x, const Matrix<Scalar>& centroids, std::vector<int>& assignment,
              std::vector<Scalar>& dist2) {
  const Eigen::Index n = x.rows();
  assignment.assign(static_cast<std::size_t>(n), 0);
  dist2.assign(static_cast<std::size_t>(n), Scalar(0));
  Scalar total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const Scalar d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    assignment[static_cast<std::size_t>(i)] = best_c;
    dist2[static_cast<std::size_t>(i)] = best;
    total += best;
  }
  return total;
}

template <typename Scalar>
Matrix<Scalar> kmeanspp_init(const Matrix<Scalar>& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Matrix<Scalar> centroids(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centroids.row(0) = x.row(pick(rng));
  std::vector<Scalar> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - centroids.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    double total = 0;
    for (Scalar v : d2) total += static_cast<double>(v);
    Eigen::Index chosen = n - 1;
    if (total <= 0) {
      chosen = pick(rng);
    } else {
      const double target = unif(rng) * total;
      double acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += static_cast<double>(d2[static_cast<std::size_t>(i)]);
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

}  // namespace detail

/// Lloyd iterations from the given initial centroids.
template <typename Derived>
ClusterModel<typename Derived::Scalar> lloyd(const Eigen::MatrixBase<Derived>& data,
                                             Matrix<typename Derived::Scalar> centroids,
                                             const KMeansOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = data;
  const int k = static_cast<int>(centroids.rows());
  ClusterModel<Scalar> model;
  model.k = k;
  std::vector<int> assignment;
  std::vector<Scalar> dist2;
  model.wcss_history.push_back(detail::assign(x, centroids, assignment, dist2));
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Matrix<Scalar> next = Matrix<Scalar>::Zero(k, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      next.row(assignment[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
    }
    std::vector<bool> taken(static_cast<std::size_t>(x.rows()), false);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: reseed at the point farthest from its current centroid.
      Eigen::Index far = 0;
      Scalar far_d = Scalar(-1);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        if (dist2[static_cast<std::size_t>(i)] > far_d) {
          far_d = dist2[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      taken[static_cast<std::size_t>(far)] = true;
      next.row(c) = x.row(far);
      model.warnings.push_back("empty cluster " + std::to_string(c) + " reseeded");
    }
    const Scalar shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(next);
    model.wcss_history.push_back(detail::assign(x, centroids, assignment, dist2));
    model.iterations = iter + 1;
    if (shift < static_cast<Scalar>(opts.tol)) {
      model.converged = true;
      break;
    }
  }
  model.centroids = std::move(centroids);
  model.assignments = std::move(assignment);
  model.wcss = model.wcss_history.back();
  return model;
}

/// k-means with k-means++ seeding from `seed`.
template <typename Derived>
ClusterModel<typename Derived::Scalar> kmeans(const Eigen::MatrixBase<Derived>& data, int k, std::uint64_t seed,
                                              const KMeansOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  if (k < 1) throw DataError("kmeans needs k >= 1");
  if (k > data.rows()) throw DataError("kmeans needs k <= number of points");
  if (!data.allFinite()) throw DataError("kmeans input contains non-finite values");
  const Matrix<Scalar> x = data;
  std::mt19937_64 rng(seed);
  return lloyd(x, detail::kmeanspp_init<Scalar>(x, k, rng), opts);
}

/// Lowest-WCSS model over `restarts` seeded runs (ties keep the earlier run).
/// `warm_start`, when given, is tried as an additional initialization.
template <typename Derived>
ClusterModel<typename Derived::Scalar> kmeans_restarts(const Eigen::MatrixBase<Derived>& data, int k,
                                                       std::uint64_t seed, int restarts = 5,
                                                       const KMeansOptions& opts = {},
                                                       const Matrix<typename Derived::Scalar>* warm_start = nullptr) {
  using Scalar = typename Derived::Scalar;
  if (restarts < 1) throw ConfigError("kmeans restarts must be >= 1");
  ClusterModel<Scalar> best;
  bool have = false;
  if (warm_start) {
    best = lloyd(data, *warm_start, opts);
    have = true;
  }
  for (int r = 0; r < restarts; ++r) {
    ClusterModel<Scalar> m = kmeans(data, k, derive_seed(seed, static_cast<std::uint64_t>(r)), opts);
    if (!have || m.wcss < best.wcss) {
      best = std::move(m);
      have = true;
    }
  }
  return best;
}

template <typename Scalar>
struct ElbowResult {
  std::vector<int> ks;
  std::vector<Scalar> wcss;
  std::vector<Scalar> chord_distance;
  int k_star = 0;
};

/// Index of the interior point farthest from the chord joining the curve's endpoints.
template <typename Scalar>
std::size_t knee_index(std::span<const int> ks, std::span<const Scalar> wcss, std::vector<Scalar>* distances = nullptr) {
  if (ks.size() < 3 || ks.size() != wcss.size()) throw DataError("elbow selection needs at least three k values");
  const Scalar x0 = ks.front(), y0 = wcss.front();
  const Scalar dx = static_cast<Scalar>(ks.back()) - x0, dy = wcss.back() - y0;
  const Scalar norm = std::sqrt(dx * dx + dy * dy);
  std::size_t best = 1;
  Scalar best_d = Scalar(-1);
  if (distances) distances->assign(ks.size(), Scalar(0));
  for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
    const Scalar px = static_cast<Scalar>(ks[i]) - x0, py = wcss[i] - y0;
    const Scalar d = norm > 0 ? std::abs(dx * py - dy * px) / norm : Scalar(0);
    if (distances) (*distances)[i] = d;
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

/// WCSS(k) over [k_min, k_max], best of `restarts`, and the knee of that curve.
/// Each k > k_min is additionally warm-started from the previous k's centroids
/// plus its worst-fit point, so the curve is non-increasing in k.
template <typename Derived>
ElbowResult<typename Derived::Scalar> elbow_select(const Eigen::MatrixBase<Derived>& data, int k_min, int k_max,
                                                   std::uint64_t seed, int restarts = 5,
                                                   const KMeansOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  if (k_min < 1 || k_max - k_min + 1 < 3) throw DataError("elbow selection needs at least three k values");
  if (k_max > data.rows()) throw DataError("elbow k range exceeds the number of points");
  const Matrix<Scalar> x = data;
  ElbowResult<Scalar> out;
  ClusterModel<Scalar> prev;
  for (int k = k_min; k <= k_max; ++k) {
    ClusterModel<Scalar> m;
    const std::uint64_t kseed = derive_seed(seed, static_cast<std::uint64_t>(k));
    if (k == k_min) {
      m = kmeans_restarts(x, k, kseed, restarts, opts);
    } else {
      std::vector<int> assignment;
      std::vector<Scalar> dist2;
      detail::assign(x, prev.centroids, assignment, dist2);
      const auto far = std::distance(dist2.begin(), std::max_element(dist2.begin(), dist2.end()));
      Matrix<Scalar> warm(k, x.cols());
      warm.topRows(k - 1) = prev.centroids;
      warm.row(k - 1) = x.row(far);
      m = kmeans_restarts(x, k, kseed, restarts, opts, &warm);
    }
    out.ks.push_back(k);
    out.wcss.push_back(m.wcss);
    prev = std::move(m);
  }
  out.k_star = out.ks[knee_index<Scalar>(out.ks, out.wcss, &out.chord_distance)];
  return out;
}

/// Fan/bot labels for a two-cluster model over the clustering feature columns.
/// The centroid with the larger standardized follower_count + sim_photo +
/// sim_username is the fan cluster (ties: cluster 0).
template <typename Scalar>
void label_clusters(ClusterModel<Scalar>& model) {
  if (model.k != 2) throw DataError("labeling defined for two clusters");
  if (model.centroids.cols() != static_cast<Eigen::Index>(kNumClusterFeatures))
    throw DataError("labeling expects the clustering feature layout");
  auto composite = [&](int c) {
    return model.centroids(c, kFollowerCount) + model.centroids(c, kSimPhoto) + model.centroids(c, kSimUsername);
  };
  const int fan = composite(1) > composite(0) ? 1 : 0;
  model.labels.assign(2, PostClass::bot);
  model.labels[static_cast<std::size_t>(fan)] = PostClass::fan;
}

/// Standardize, then k-means with restarts; the model keeps the scaling.
template <typename Derived>
ClusterModel<typename Derived::Scalar> fit_clusters(const Eigen::MatrixBase<Derived>& raw, int k, std::uint64_t seed,
                                                    int restarts = 5, const KMeansOptions& opts = {}) {
  auto st = standardize(raw);
  auto model = kmeans_restarts(st.z, k, seed, restarts, opts);
  for (Eigen::Index j : st.params.constant_columns)
    model.warnings.push_back("constant feature column " + std::to_string(j) + " left unscaled");
  model.scaling = std::move(st.params);
  return model;
}

template <typename Scalar>
struct PointReport {
  int cluster = 0;
  Scalar distance = 0;
  bool outlier = false;
};

/// Distance of each point to its centroid; outliers lie beyond `factor` times
/// their cluster's median distance.
template <typename Derived>
std::vector<PointReport<typename Derived::Scalar>> point_reports(const ClusterModel<typename Derived::Scalar>& model,
                                                                 const Eigen::MatrixBase<Derived>& z,
                                                                 double factor = 3.0) {
  using Scalar = typename Derived::Scalar;
  std::vector<PointReport<Scalar>> out(static_cast<std::size_t>(z.rows()));
  std::vector<std::vector<Scalar>> per_cluster(static_cast<std::size_t>(model.k));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    int best_c = 0;
    for (int c = 0; c < model.k; ++c) {
      const Scalar d = (z.row(i) - model.centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    out[static_cast<std::size_t>(i)] = {best_c, std::sqrt(best), false};
    per_cluster[static_cast<std::size_t>(best_c)].push_back(std::sqrt(best));
  }
  std::vector<Scalar> medians(static_cast<std::size_t>(model.k), Scalar(0));
  for (std::size_t c = 0; c < per_cluster.size(); ++c) {
    auto& v = per_cluster[c];
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    medians[c] = v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / Scalar(2);
  }
  for (auto& r : out)
    r.outlier = r.distance > static_cast<Scalar>(factor) * medians[static_cast<std::size_t>(r.cluster)];
  return out;
}

}  // namespace impsense::clustering
