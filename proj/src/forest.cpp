#include "impsense/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace impsense::eval {
namespace {

double gini(const std::array<long, kNumClasses>& counts, long n) {
  if (n == 0) return 0.0;
  double s = 1.0;
  for (long c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    s -= p * p;
  }
  return s;
}

int majority(const std::array<long, kNumClasses>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct BestSplit {
  int feature = -1;
  double threshold = 0;
  double impurity = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const MatrixXd& x, std::span<const int> y, const ForestOptions& opts, int max_features,
              std::mt19937_64& rng)
      : x_(x), y_(y), opts_(opts), max_features_(max_features), rng_(rng) {
    features_.resize(static_cast<std::size_t>(x.cols()));
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> sample) {
    DecisionTree tree;
    tree.training_indices = sample;
    struct Work {
      int node;
      std::vector<std::size_t> idx;
      int depth;
    };
    tree.nodes.emplace_back();
    std::vector<Work> stack;
    stack.push_back({0, std::move(sample), 0});
    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      std::array<long, kNumClasses> counts{};
      for (std::size_t i : w.idx) ++counts[static_cast<std::size_t>(y_[i])];
      tree.nodes[static_cast<std::size_t>(w.node)].label = majority(counts);
      const long n = static_cast<long>(w.idx.size());
      const bool pure = std::count(counts.begin(), counts.end(), 0L) >= kNumClasses - 1;
      if (pure || n < opts_.min_samples_split || (opts_.max_depth >= 0 && w.depth >= opts_.max_depth)) continue;
      const BestSplit s = find_split(w.idx);
      if (s.feature < 0) continue;

      std::vector<std::size_t> left, right;
      for (std::size_t i : w.idx) (x_(static_cast<Eigen::Index>(i), s.feature) <= s.threshold ? left : right).push_back(i);
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(w.node)];
      node.feature = s.feature;
      node.threshold = s.threshold;
      node.left = l;
      node.right = l + 1;
      stack.push_back({l + 1, std::move(right), w.depth + 1});
      stack.push_back({l, std::move(left), w.depth + 1});
    }
    return tree;
  }

 private:
  BestSplit find_split(const std::vector<std::size_t>& idx) {
    std::shuffle(features_.begin(), features_.end(), rng_);
    BestSplit best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> vals(idx.size());
    const long n = static_cast<long>(idx.size());
    int examined = 0;
    for (int f : features_) {
      if (examined >= max_features_ && best.feature >= 0) break;
      ++examined;
      for (std::size_t i = 0; i < idx.size(); ++i) vals[i] = {x_(static_cast<Eigen::Index>(idx[i]), f), y_[idx[i]]};
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;
      std::array<long, kNumClasses> left{}, right{};
      for (const auto& v : vals) ++right[static_cast<std::size_t>(v.second)];
      for (long i = 0; i + 1 < n; ++i) {
        const auto c = static_cast<std::size_t>(vals[static_cast<std::size_t>(i)].second);
        ++left[c];
        --right[c];
        const double a = vals[static_cast<std::size_t>(i)].first, b = vals[static_cast<std::size_t>(i + 1)].first;
        if (a == b) continue;
        const long nl = i + 1, nr = n - nl;
        const double imp = static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr);
        if (imp < best.impurity) {
          best.impurity = imp;
          best.feature = f;
          best.threshold = a + (b - a) / 2;
          // the midpoint can round up to b for adjacent doubles
          if (!(best.threshold < b)) best.threshold = a;
        }
      }
    }
    return best;
  }

  const MatrixXd& x_;
  std::span<const int> y_;
  const ForestOptions& opts_;
  int max_features_;
  std::mt19937_64& rng_;
  std::vector<int> features_;
};

}  // namespace

int DecisionTree::predict(const Eigen::Ref<const RowVector<double>>& x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].label;
}

ForestModel forest_train(const MatrixXd& x, std::span<const int> labels, const ForestOptions& opts,
                         std::uint64_t seed) {
  if (opts.trees < 1) throw ConfigError("forest needs at least one tree");
  if (static_cast<std::size_t>(x.rows()) != labels.size() || labels.empty())
    throw DataError("forest: features and labels must be non-empty and equal in length");
  for (int l : labels)
    if (l < 0 || l >= kNumClasses) throw DataError("forest: label out of range");
  ForestModel model;
  model.n_features = static_cast<int>(x.cols());
  const int max_features = opts.max_features > 0
                               ? std::min(opts.max_features, model.n_features)
                               : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(x.cols()))));
  if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end())
    model.warnings.push_back("single-class training set: constant model");

  const std::size_t n = labels.size();
  for (int t = 0; t < opts.trees; ++t) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = pick(rng);
    TreeBuilder builder(x, labels, opts, max_features, rng);
    model.trees.push_back(builder.build(std::move(sample)));
  }
  return model;
}

std::vector<int> forest_predict(const ForestModel& model, const MatrixXd& x) {
  if (x.cols() != model.n_features) throw DataError("forest: feature width mismatch");
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::array<long, kNumClasses> votes{};
    for (const auto& tree : model.trees) ++votes[static_cast<std::size_t>(tree.predict(x.row(i)))];
    out[static_cast<std::size_t>(i)] = majority(votes);
  }
  return out;
}

}  // namespace impsense::eval
