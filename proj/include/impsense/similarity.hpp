#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "impsense/common.hpp"
#include "impsense/textprep.hpp"

namespace impsense::similarity {

inline constexpr double kDefaultThreshold = 0.30;

/// Cosine between binary character-bigram presence vectors. Both strings are
/// lowercased and stripped of '_', '.', and whitespace first. 0 when either
/// side has no bigram.
double text_cosine(std::string_view a, std::string_view b);

/// Face-match verdicts are supplied from outside; no face model lives here.
class PhotoOracle {
 public:
  virtual ~PhotoOracle() = default;
  /// nullopt when the oracle has no verdict for the pair.
  virtual std::optional<bool> lookup(const std::string& a, const std::string& b) const = 0;
};

/// Table of precomputed verdicts, `photo_a TAB photo_b TAB {0|1}` per line.
/// Lookups are order-insensitive; misses are counted.
class PhotoTableOracle : public PhotoOracle {
 public:
  PhotoTableOracle() = default;
  PhotoTableOracle(const PhotoTableOracle& other);
  PhotoTableOracle& operator=(const PhotoTableOracle& other);
  static PhotoTableOracle load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  void set(const std::string& a, const std::string& b, bool similar);
  std::optional<bool> lookup(const std::string& a, const std::string& b) const override;

  std::size_t misses() const { return misses_.load(); }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, bool> table_;
  mutable std::atomic<std::size_t> misses_{0};
};

/// Oracle verdict; false when either side has no photo or the oracle misses.
bool photo_similar(const ProfileRecord& candidate, const ProfileRecord& genuine, const PhotoOracle& oracle);

struct SimilarityReport {
  double sim_username = 0.0;
  double sim_full_name = 0.0;
  double sim_biography = 0.0;
  bool photo_similar = false;
  int similar_feature_count = 0;
  bool is_impersonator = false;
  std::string genuine_target;
};

/// Scores one candidate against one genuine account. The biography is passed
/// through replace_entities (and demojize when `emoji` is given) before scoring.
SimilarityReport assess_profile(const ProfileRecord& candidate, const ProfileRecord& genuine,
                                const PhotoOracle& oracle, double threshold = kDefaultThreshold,
                                const textprep::EmojiTable* emoji = nullptr);

/// Most / least number of similar features over a candidate's reports.
/// Zero-count reports are ignored for the minimum unless every count is zero.
std::pair<int, int> msf_lsf(std::span<const SimilarityReport> reports);

struct CandidateAssessment {
  SimilarityReport best;  // highest feature count, ties by highest sim_username
  int msf = 0;
  int lsf = 0;
};

/// Assesses against every genuine account whose username differs from the candidate's.
CandidateAssessment assess_against_community(const ProfileRecord& candidate,
                                             std::span<const ProfileRecord> community,
                                             const PhotoOracle& oracle, double threshold = kDefaultThreshold,
                                             const textprep::EmojiTable* emoji = nullptr);

}  // namespace impsense::similarity
