#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <vector>

#include "impsense/common.hpp"

namespace impsense::balance {

template <typename Scalar>
struct SmoteResult {
  Matrix<Scalar> synthetic;             // one row per generated point
  std::vector<Eigen::Index> source;     // row of the minority point x
  std::vector<Eigen::Index> neighbor;   // row of the chosen neighbour
  std::vector<Scalar> gap;              // u in x + u (x_nn - x)
};

/// Indices of the k nearest rows of `x` to row i (excluding i), by squared
/// Euclidean distance with ties broken by row index.
template <typename Derived>
std::vector<std::vector<Eigen::Index>> nearest_neighbors(const Eigen::MatrixBase<Derived>& x, int k) {
  const Eigen::Index n = x.rows();
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<typename Derived::Scalar, Eigen::Index>> d;
  for (Eigen::Index i = 0; i < n; ++i) {
    d.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) d.emplace_back((x.row(i) - x.row(j)).squaredNorm(), j);
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
    auto& nn = out[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < kk; ++t) nn.push_back(d[t].second);
  }
  return out;
}

/// SMOTE: emits max(0, target_count - n) points, each x + u (x_nn - x) for a
/// uniformly drawn minority row x, one of its k nearest minority neighbours
/// x_nn, and u ~ U(0, 1). k is capped at n - 1.
template <typename Derived>
SmoteResult<typename Derived::Scalar> smote(const Eigen::MatrixBase<Derived>& minority, Eigen::Index target_count,
                                            int k, std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = minority.rows();
  if (n < 2) throw DataError("SMOTE needs >= 2 samples");
  if (k < 1) throw ConfigError("SMOTE needs k >= 1");
  k = std::min<int>(k, static_cast<int>(n - 1));
  const Eigen::Index count = std::max<Eigen::Index>(0, target_count - n);

  SmoteResult<Scalar> out;
  out.synthetic.resize(count, minority.cols());
  if (count == 0) return out;
  const auto nn = nearest_neighbors(minority, k);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick_row(0, n - 1);
  std::uniform_int_distribution<int> pick_nn(0, k - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index s = 0; s < count; ++s) {
    const Eigen::Index x = pick_row(rng);
    const Eigen::Index y = nn[static_cast<std::size_t>(x)][static_cast<std::size_t>(pick_nn(rng))];
    const auto u = static_cast<Scalar>(unif(rng));
    out.synthetic.row(s) = minority.row(x) + u * (minority.row(y) - minority.row(x));
    out.source.push_back(x);
    out.neighbor.push_back(y);
    out.gap.push_back(u);
  }
  return out;
}

/// Uniform sample of `target_count` of the indices [0, n) without replacement,
/// returned in ascending order.
std::vector<Eigen::Index> random_undersample(Eigen::Index n, Eigen::Index target_count, std::uint64_t seed);

template <typename Scalar>
struct LabeledFeatureSet {
  Matrix<Scalar> features;         // n × d
  std::vector<PostClass> labels;
  std::vector<bool> synthetic;     // true for SMOTE output
  std::vector<Eigen::Index> origin;  // input row each output row derives from

  Eigen::Index size() const { return features.rows(); }
  std::array<Eigen::Index, kNumClasses> class_counts() const {
    std::array<Eigen::Index, kNumClasses> c{};
    for (PostClass l : labels) ++c[static_cast<std::size_t>(class_index(l))];
    return c;
  }
};

struct BalanceOptions {
  int smote_k = 5;
};

/// Equalizes the three classes at the median class count: smaller classes are
/// SMOTE-augmented, larger ones randomly under-sampled. Rows are grouped by
/// class (bot, fan, genuine); kept real rows keep their input order and
/// synthetic rows follow.
template <typename Scalar>
LabeledFeatureSet<Scalar> balance(const LabeledFeatureSet<Scalar>& data, std::uint64_t seed,
                                  const BalanceOptions& opts = {}) {
  if (static_cast<std::size_t>(data.features.rows()) != data.labels.size())
    throw DataError("balance: feature rows and labels differ in length");
  std::array<std::vector<Eigen::Index>, kNumClasses> rows;
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    rows[static_cast<std::size_t>(class_index(data.labels[i]))].push_back(static_cast<Eigen::Index>(i));
  std::array<Eigen::Index, kNumClasses> counts{};
  for (int c = 0; c < kNumClasses; ++c) {
    counts[static_cast<std::size_t>(c)] = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(c)].size());
    if (counts[static_cast<std::size_t>(c)] < 2)
      throw DataError("balance needs at least two examples of class " + std::string(to_string(class_from_index(c))));
  }
  auto sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const Eigen::Index target = sorted[1];

  LabeledFeatureSet<Scalar> out;
  out.features.resize(target * kNumClasses, data.features.cols());
  Eigen::Index row = 0;
  auto emit = [&](const auto& values, PostClass label, bool synthetic, Eigen::Index origin) {
    out.features.row(row++) = values;
    out.labels.push_back(label);
    out.synthetic.push_back(synthetic);
    out.origin.push_back(origin);
  };
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& idx = rows[static_cast<std::size_t>(c)];
    const PostClass label = class_from_index(c);
    const Eigen::Index have = static_cast<Eigen::Index>(idx.size());
    if (have > target) {
      const auto keep = random_undersample(have, target, derive_seed(seed, 2 * static_cast<std::uint64_t>(c)));
      for (Eigen::Index k : keep) {
        const Eigen::Index src = idx[static_cast<std::size_t>(k)];
        emit(data.features.row(src), label, false, src);
      }
      continue;
    }
    Matrix<Scalar> minority(have, data.features.cols());
    for (Eigen::Index i = 0; i < have; ++i) {
      minority.row(i) = data.features.row(idx[static_cast<std::size_t>(i)]);
      emit(minority.row(i), label, false, idx[static_cast<std::size_t>(i)]);
    }
    const auto syn = smote(minority, target, opts.smote_k, derive_seed(seed, 2 * static_cast<std::uint64_t>(c) + 1));
    for (Eigen::Index s = 0; s < syn.synthetic.rows(); ++s)
      emit(syn.synthetic.row(s), label, true, idx[static_cast<std::size_t>(syn.source[static_cast<std::size_t>(s)])]);
  }
  return out;
}

}  // namespace impsense::balance
