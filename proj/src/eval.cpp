#include "impsense/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace impsense::eval {
namespace {

std::array<std::vector<std::size_t>, kNumClasses> by_class(std::span<const int> labels) {
  std::array<std::vector<std::size_t>, kNumClasses> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= kNumClasses) throw DataError("label out of range");
    out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

}  // namespace

Split split(std::span<const int> labels, double train_frac, std::uint64_t seed) {
  if (labels.size() < 4) throw DataError("split needs at least 4 examples");
  if (!(train_frac > 0 && train_frac < 1)) throw ConfigError("train fraction must lie in (0, 1)");
  auto groups = by_class(labels);
  // Largest remainder: per-class floor, then the leftover seats by fractional part.
  std::vector<std::size_t> n_train(groups.size());
  std::vector<std::pair<double, std::size_t>> rest;
  std::size_t seated = 0;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    if (groups[c].size() < 2) throw DataError("split: class " + std::string(to_string(class_from_index(static_cast<int>(c)))) +
                                              " has fewer than 2 examples");
    const double exact = train_frac * static_cast<double>(groups[c].size());
    n_train[c] = static_cast<std::size_t>(std::floor(exact));
    seated += n_train[c];
    rest.emplace_back(-(exact - std::floor(exact)), c);
  }
  std::sort(rest.begin(), rest.end());
  const auto target = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(labels.size())));
  for (std::size_t i = 0; seated < target && i < rest.size(); ++i, ++seated) ++n_train[rest[i].second];

  Split out;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    auto& g = groups[c];
    std::mt19937_64 rng(derive_seed(seed, c));
    std::shuffle(g.begin(), g.end(), rng);
    const auto cut = g.begin() + static_cast<std::ptrdiff_t>(n_train[c]);
    out.train.insert(out.train.end(), g.begin(), cut);
    out.test.insert(out.test.end(), cut, g.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<Fold> kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold needs k >= 2");
  if (labels.size() < static_cast<std::size_t>(k)) throw DataError("kfold needs at least k examples");
  auto groups = by_class(labels);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    std::shuffle(groups[c].begin(), groups[c].end(), rng);
    order.insert(order.end(), groups[c].begin(), groups[c].end());
  }
  std::vector<int> fold_of(labels.size());
  for (std::size_t p = 0; p < order.size(); ++p) fold_of[order[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int f = 0; f < k; ++f)
      (fold_of[i] == f ? folds[static_cast<std::size_t>(f)].validation : folds[static_cast<std::size_t>(f)].train)
          .push_back(i);
  return folds;
}

MetricsReport metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw DataError("metrics: predictions and labels differ in length");
  if (labels.empty()) throw DataError("metrics: no examples");
  MetricsReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= kNumClasses || predictions[i] < 0 || predictions[i] >= kNumClasses)
      throw DataError("metrics: class index out of range");
    ++r.confusion(labels[i], predictions[i]);
  }
  r.accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(labels.size());
  for (int c = 0; c < kNumClasses; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    const long tp = r.confusion(c, c);
    const long support = r.confusion.row(c).sum();
    const long predicted = r.confusion.col(c).sum();
    r.support[cc] = support;
    const std::string name(to_string(class_from_index(c)));
    if (support == 0) r.warnings.push_back("class " + name + " has no support");
    if (predicted == 0) r.warnings.push_back("class " + name + " is never predicted");
    r.precision[cc] = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    r.recall[cc] = support > 0 ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    const double s = r.precision[cc] + r.recall[cc];
    r.f1[cc] = s > 0 ? 2 * r.precision[cc] * r.recall[cc] / s : 0.0;
  }
  auto mean = [](const std::array<double, kNumClasses>& a) {
    return std::accumulate(a.begin(), a.end(), 0.0) / kNumClasses;
  };
  r.macro_precision = mean(r.precision);
  r.macro_recall = mean(r.recall);
  r.macro_f1 = mean(r.f1);
  return r;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  return s;
}

Tfidf Tfidf::fit(std::span<const std::string> corpus, std::size_t vocab_cap) {
  if (corpus.empty()) throw DataError("TF-IDF needs a non-empty corpus");
  Tfidf t;
  t.vocab_ = features::Vocabulary::fit(corpus, vocab_cap);
  const auto V = static_cast<Eigen::Index>(t.vocab_.size());
  VectorXd df = VectorXd::Zero(V);
  std::vector<char> seen(static_cast<std::size_t>(V));
  for (const auto& doc : corpus) {
    std::fill(seen.begin(), seen.end(), 0);
    std::istringstream ss(doc);
    std::string tok;
    while (ss >> tok) {
      const int id = t.vocab_.id(tok);
      if (id >= 1 && id <= V && !seen[static_cast<std::size_t>(id - 1)]) {
        seen[static_cast<std::size_t>(id - 1)] = 1;
        df(id - 1) += 1;
      }
    }
  }
  const double N = static_cast<double>(corpus.size());
  t.idf_ = ((1.0 + N) / (1.0 + df.array())).log() + 1.0;
  return t;
}

MatrixXd Tfidf::transform(std::span<const std::string> corpus) const {
  const auto V = static_cast<Eigen::Index>(vocab_.size());
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(corpus.size()), V);
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    std::istringstream ss(corpus[d]);
    std::string tok;
    double length = 0;
    const auto row = static_cast<Eigen::Index>(d);
    while (ss >> tok) {
      length += 1;
      const int id = vocab_.id(tok);
      if (id >= 1 && id <= V) out(row, id - 1) += 1;
    }
    if (length == 0) continue;
    out.row(row) = (out.row(row).array() / length) * idf_.transpose().array();
    const double norm = out.row(row).norm();
    if (norm > 0) out.row(row) /= norm;
  }
  return out;
}

}  // namespace impsense::eval
