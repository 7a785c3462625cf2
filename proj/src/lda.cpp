#include "impsense/lda.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace impsense::features {
namespace {

// Draws an index with probability proportional to weights.
int sample(const std::vector<double>& weights, double total, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, total);
  double u = unif(rng);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

TopicModel lda_fit(const std::vector<textprep::TokenList>& corpus, const LdaOptions& opts, std::uint64_t seed) {
  if (opts.topics < 1) throw ConfigError("LDA needs at least one topic");
  if (opts.beta <= 0) throw ConfigError("LDA beta must be positive");
  const int K = opts.topics;
  if (corpus.size() < static_cast<std::size_t>(K)) throw DataError("LDA corpus has fewer documents than topics");

  TopicModel m;
  m.k_ = K;
  m.alpha_ = opts.alpha > 0 ? opts.alpha : 50.0 / K;
  m.beta_ = opts.beta;
  for (const auto& doc : corpus) {
    std::vector<int> ids;
    ids.reserve(doc.size());
    for (const auto& w : doc) {
      auto [it, inserted] = m.word_index_.try_emplace(w, static_cast<int>(m.words_.size()));
      if (inserted) m.words_.push_back(w);
      ids.push_back(it->second);
    }
    m.doc_words_.push_back(std::move(ids));
  }
  if (m.words_.size() < static_cast<std::size_t>(K)) throw DataError("LDA vocabulary is smaller than the topic count");

  const std::size_t V = m.words_.size();
  const std::size_t D = m.doc_words_.size();
  m.topic_word_.assign(static_cast<std::size_t>(K), std::vector<int>(V, 0));
  m.topic_total_.assign(static_cast<std::size_t>(K), 0);
  m.doc_topic_.assign(D, std::vector<int>(static_cast<std::size_t>(K), 0));
  m.z_.resize(D);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_topic(0, K - 1);
  for (std::size_t d = 0; d < D; ++d) {
    m.z_[d].resize(m.doc_words_[d].size());
    for (std::size_t i = 0; i < m.doc_words_[d].size(); ++i) {
      const int t = pick_topic(rng);
      m.z_[d][i] = t;
      ++m.topic_word_[static_cast<std::size_t>(t)][static_cast<std::size_t>(m.doc_words_[d][i])];
      ++m.topic_total_[static_cast<std::size_t>(t)];
      ++m.doc_topic_[d][static_cast<std::size_t>(t)];
    }
  }

  const double vbeta = static_cast<double>(V) * m.beta_;
  std::vector<double> p(static_cast<std::size_t>(K));
  for (int iter = 0; iter < opts.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < m.doc_words_[d].size(); ++i) {
        const auto w = static_cast<std::size_t>(m.doc_words_[d][i]);
        const auto old = static_cast<std::size_t>(m.z_[d][i]);
        --m.topic_word_[old][w];
        --m.topic_total_[old];
        --m.doc_topic_[d][old];
        double total = 0;
        for (std::size_t t = 0; t < p.size(); ++t) {
          p[t] = (m.doc_topic_[d][t] + m.alpha_) * (m.topic_word_[t][w] + m.beta_) / (m.topic_total_[t] + vbeta);
          total += p[t];
        }
        const auto nt = static_cast<std::size_t>(sample(p, total, rng));
        m.z_[d][i] = static_cast<int>(nt);
        ++m.topic_word_[nt][w];
        ++m.topic_total_[nt];
        ++m.doc_topic_[d][nt];
      }
    }
  }
  return m;
}

VectorXd TopicModel::topic_word_distribution(int t) const {
  const auto& row = topic_word_.at(static_cast<std::size_t>(t));
  VectorXd out(static_cast<Eigen::Index>(row.size()));
  const double denom = topic_total_[static_cast<std::size_t>(t)] + static_cast<double>(row.size()) * beta_;
  for (std::size_t w = 0; w < row.size(); ++w) out(static_cast<Eigen::Index>(w)) = (row[w] + beta_) / denom;
  return out;
}

VectorXd TopicModel::document_distribution(std::size_t doc) const {
  const auto& counts = doc_topic_.at(doc);
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0));
  VectorXd out(k_);
  for (int t = 0; t < k_; ++t) out(t) = (counts[static_cast<std::size_t>(t)] + alpha_) / (n + k_ * alpha_);
  return out;
}

std::vector<std::string> TopicModel::top_words(int t, std::size_t m) const {
  const auto& row = topic_word_.at(static_cast<std::size_t>(t));
  std::vector<int> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(m, order.size()); ++i) {
    if (row[static_cast<std::size_t>(order[i])] == 0) break;
    out.push_back(words_[static_cast<std::size_t>(order[i])]);
  }
  return out;
}

std::size_t TopicModel::total_assigned() const {
  std::size_t n = 0;
  for (const auto& row : topic_word_)
    for (int c : row) n += static_cast<std::size_t>(c);
  return n;
}

bool TopicModel::counts_consistent() const {
  for (std::size_t t = 0; t < topic_word_.size(); ++t) {
    long sum = 0;
    for (int c : topic_word_[t]) {
      if (c < 0) return false;
      sum += c;
    }
    if (sum != topic_total_[t]) return false;
  }
  return true;
}

VectorXd TopicModel::infer(std::span<const std::string> tokens, int iterations, std::uint64_t seed) const {
  std::vector<std::size_t> ids;
  for (const auto& tok : tokens) {
    auto it = word_index_.find(tok);
    if (it != word_index_.end()) ids.push_back(static_cast<std::size_t>(it->second));
  }
  std::vector<int> counts(static_cast<std::size_t>(k_), 0);
  VectorXd out(k_);
  if (ids.empty()) {
    out.setConstant(1.0 / k_);
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_topic(0, k_ - 1);
  std::vector<int> z(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    z[i] = pick_topic(rng);
    ++counts[static_cast<std::size_t>(z[i])];
  }
  const double vbeta = static_cast<double>(words_.size()) * beta_;
  std::vector<double> p(static_cast<std::size_t>(k_));
  for (int iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      --counts[static_cast<std::size_t>(z[i])];
      double total = 0;
      for (std::size_t t = 0; t < p.size(); ++t) {
        p[t] = (counts[t] + alpha_) * (topic_word_[t][ids[i]] + beta_) / (topic_total_[t] + vbeta);
        total += p[t];
      }
      z[i] = sample(p, total, rng);
      ++counts[static_cast<std::size_t>(z[i])];
    }
  }
  const double n = static_cast<double>(ids.size());
  for (int t = 0; t < k_; ++t) out(t) = (counts[static_cast<std::size_t>(t)] + alpha_) / (n + k_ * alpha_);
  return out;
}

int TopicModel::dominant_topic(std::span<const std::string> tokens, int iterations, std::uint64_t seed) const {
  const VectorXd dist = infer(tokens, iterations, seed);
  Eigen::Index best = 0;
  dist.maxCoeff(&best);
  return static_cast<int>(best);
}

std::string TopicModel::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << k_ << ' ' << alpha_ << ' ' << beta_ << '\n';
  for (std::size_t w = 0; w < words_.size(); ++w) {
    out << words_[w] << '\t';
    for (int t = 0; t < k_; ++t) out << (t ? " " : "") << topic_word_[static_cast<std::size_t>(t)][w];
    out << '\n';
  }
  return out.str();
}

TopicModel TopicModel::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  TopicModel m;
  if (!(in >> m.k_ >> m.alpha_ >> m.beta_) || m.k_ < 1 || !(m.beta_ > 0)) throw DataError("bad topic model header");
  m.topic_word_.assign(static_cast<std::size_t>(m.k_), {});
  m.topic_total_.assign(static_cast<std::size_t>(m.k_), 0);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("bad topic model row");
    const std::string word = line.substr(0, tab);
    m.word_index_.emplace(word, static_cast<int>(m.words_.size()));
    m.words_.push_back(word);
    std::istringstream counts(line.substr(tab + 1));
    for (int t = 0; t < m.k_; ++t) {
      int c = 0;
      if (!(counts >> c) || c < 0) throw DataError("bad topic model counts for '" + word + "'");
      m.topic_word_[static_cast<std::size_t>(t)].push_back(c);
      m.topic_total_[static_cast<std::size_t>(t)] += c;
    }
  }
  return m;
}

}  // namespace impsense::features
