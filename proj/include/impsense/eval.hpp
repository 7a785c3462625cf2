#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "impsense/common.hpp"
#include "impsense/features.hpp"

namespace impsense::eval {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified split of indices into [0, labels.size()). round(train_frac * n)
/// examples train; class c gets floor or ceil of train_frac * n_c, the extra
/// seats going to the largest fractional parts. Both halves are sorted.
Split split(std::span<const int> labels, double train_frac, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Stratified k folds: each class is shuffled, classes are laid end to end,
/// and position p goes to fold p mod k. Fold sizes differ by at most one.
std::vector<Fold> kfold(std::span<const int> labels, int k, std::uint64_t seed);

struct MetricsReport {
  double accuracy = 0;
  std::array<double, kNumClasses> precision{}, recall{}, f1{};
  std::array<long, kNumClasses> support{};
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
  Eigen::Matrix<long, kNumClasses, kNumClasses> confusion = decltype(confusion)::Zero();  // row: truth, col: predicted
  std::vector<std::string> warnings;
};

/// Confusion-matrix metrics. Classes without support, or never predicted,
/// score 0 for the undefined ratios and add a warning.
MetricsReport metrics(std::span<const int> predictions, std::span<const int> labels);

struct MetricSummary {
  double mean = 0;
  double stddev = 0;  // population
};
MetricSummary summarize(std::span<const double> values);

/// Smoothed TF-IDF over a vocabulary capped by corpus frequency.
///   tf = count / document length, idf = ln((1 + N) / (1 + df)) + 1,
/// rows L2-normalized (an empty document stays a zero row).
class Tfidf {
 public:
  static Tfidf fit(std::span<const std::string> corpus, std::size_t vocab_cap = 1000);
  MatrixXd transform(std::span<const std::string> corpus) const;

  const features::Vocabulary& vocabulary() const { return vocab_; }
  const VectorXd& idf() const { return idf_; }

 private:
  features::Vocabulary vocab_;
  VectorXd idf_;
};

}  // namespace impsense::eval
