#pragma once

#include <span>
#include <string>
#include <vector>

#include "impsense/common.hpp"

namespace impsense::eval {

struct ForestOptions {
  int trees = 100;
  int max_depth = -1;  // negative: unlimited
  int min_samples_split = 2;
  int max_features = 0;  // 0: floor(sqrt(d)), at least 1
};

/// CART tree over dense features. Internal nodes send x[feature] <= threshold left.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1, right = -1;
    int label = 0;
  };
  std::vector<Node> nodes;  // node 0 is the root
  std::vector<std::size_t> training_indices;  // bootstrap sample, with repeats

  int predict(const Eigen::Ref<const RowVector<double>>& x) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_features = 0;
  std::vector<std::string> warnings;
};

/// Bootstrap per tree (seeded by (seed, tree)), Gini splits over a random
/// feature subset. The subset is extended in random order until a valid split
/// exists. A single-class training set gives a constant model and a warning.
ForestModel forest_train(const MatrixXd& x, std::span<const int> labels, const ForestOptions& opts, std::uint64_t seed);

/// Majority vote, ties to the lowest class index.
std::vector<int> forest_predict(const ForestModel& model, const MatrixXd& x);

}  // namespace impsense::eval
