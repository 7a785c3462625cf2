#pragma once

#include <span>
#include <string_view>
#include <string>
#include <unordered_map>
#include <vector>

#include "impsense/common.hpp"
#include "impsense/textprep.hpp"

namespace impsense::features {

struct LdaOptions {
  int topics = 10;
  double alpha = -1.0;  // negative: 50 / topics
  double beta = 0.01;
  int iterations = 200;
};

/// Collapsed Gibbs LDA. Immutable once fitted; inference on unseen documents
/// samples against the frozen topic-word counts.
class TopicModel {
 public:
  int topics() const { return k_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::size_t vocabulary_size() const { return words_.size(); }
  std::size_t documents() const { return doc_topic_.size(); }

  /// Normalized word distribution of topic t (length vocabulary_size()).
  VectorXd topic_word_distribution(int t) const;
  /// (n_dk + alpha) / (n_d + K alpha) for a training document.
  VectorXd document_distribution(std::size_t doc) const;
  /// Up to m words of topic t by count, ties by first appearance in the corpus.
  std::vector<std::string> top_words(int t, std::size_t m) const;
  /// Topic assignments of training document `doc` (one per known token).
  const std::vector<int>& assignments(std::size_t doc) const { return z_[doc]; }
  /// Sum of topic-word counts; equals the number of training tokens.
  std::size_t total_assigned() const;
  /// Topic totals (n_k) consistency check against the topic-word matrix.
  bool counts_consistent() const;

  /// Topic distribution of an unseen document; unknown words are ignored.
  VectorXd infer(std::span<const std::string> tokens, int iterations, std::uint64_t seed) const;
  /// Highest-probability topic of infer(), ties to the lowest index.
  int dominant_topic(std::span<const std::string> tokens, int iterations, std::uint64_t seed) const;

  /// Text form of the frozen counts: a "topics alpha beta" line, then one
  /// "word TAB count_0 ... count_{K-1}" line per word. Training assignments are not kept.
  std::string serialize() const;
  static TopicModel deserialize(std::string_view text);

  friend TopicModel lda_fit(const std::vector<textprep::TokenList>& corpus, const LdaOptions& opts,
                            std::uint64_t seed);

 private:
  int k_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> word_index_;
  std::vector<std::vector<int>> topic_word_;  // K × V
  std::vector<int> topic_total_;
  std::vector<std::vector<int>> doc_topic_;  // D × K
  std::vector<std::vector<int>> z_;
  std::vector<std::vector<int>> doc_words_;
};

/// Errors when the corpus has fewer documents or distinct words than topics.
TopicModel lda_fit(const std::vector<textprep::TokenList>& corpus, const LdaOptions& opts, std::uint64_t seed);

}  // namespace impsense::features
