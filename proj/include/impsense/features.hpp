#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "impsense/common.hpp"
#include "impsense/similarity.hpp"
#include "impsense/textprep.hpp"

namespace impsense::features {

using textprep::TokenList;

inline constexpr std::size_t kDefaultVocabCap = 30000;
inline constexpr int kDefaultSeqLen = 100;

/// Token → index by descending corpus frequency (ties: first occurrence).
/// Index 0 is padding and size()+1 the out-of-vocabulary id.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Documents are whitespace-tokenized.
  static Vocabulary fit(std::span<const std::string> corpus, std::size_t cap = kDefaultVocabCap);
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  /// "token TAB index" lines in index order.
  std::string serialize() const;
  std::string sha256() const;

  std::size_t size() const { return tokens_.size(); }
  int oov_id() const { return static_cast<int>(tokens_.size()) + 1; }
  int id(std::string_view token) const;
  /// Token for an index in [1, size()]; empty for padding/OOV.
  const std::string& token(int id) const;

 private:
  std::vector<std::string> tokens_;  // tokens_[i] has index i + 1
  std::unordered_map<std::string, int> index_;
};

/// Token ids of `text`, left-padded with 0 or truncated at the tail to `length`,
/// so the LSTM's last steps see the text.
std::vector<int> encode(std::string_view text, const Vocabulary& vocab, int length = kDefaultSeqLen);
/// Inverse of encode for in-vocabulary ids; padding and OOV ids are skipped.
TokenList decode(std::span<const int> ids, const Vocabulary& vocab);

class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  static SentimentLexicon load(const std::filesystem::path& path);
  void set(std::string word, double valence);
  const double* valence(std::string_view word) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::unordered_map<std::string, double> values_;
};

/// Mean valence of the tokens found in the lexicon; 0 when none match.
double sentiment(std::span<const std::string> tokens, const SentimentLexicon& lexicon);

/// numerator / denominator, or numerator / (denominator + 1) when the denominator is 0.
double ratio(double numerator, double denominator);

inline constexpr std::size_t kMetadataDim = 22;

enum MetadataField : std::size_t {
  kLikeCount = 0,
  kCommentCount,
  kTaggedUsersCount,
  kMentionUsersCount,
  kHashtagCount,
  kCaptionSentiment,
  kHashtagSentiment,
  kMediaType,
  kEmojiCount,
  kHasUrl,
  kDateAgeDays,
  kSimUsername,
  kSimFullName,
  kSimBiography,
  kSimPhoto,
  kFollower,
  kFollowee,
  kPostCount,
  kFollowingFollowersRatio,
  kFollowersPostsRatio,
  kBioEmojiCount,
  kBioHashtagCount,
};

inline constexpr std::array<std::string_view, kMetadataDim> kMetadataNames{
    "like_count",       "comment_count",    "tagged_users_count", "mention_users_count",
    "hashtag_count",    "caption_sentiment", "hashtag_sentiment", "media_type",
    "emoji_count",      "has_url",          "date_age_days",      "sim_username",
    "sim_full_name",    "sim_biography",    "sim_photo",          "follower",
    "followee",         "post_count",       "following_followers_ratio", "followers_posts_ratio",
    "bio_emoji_count",  "bio_hashtag_count"};

using MetadataVector = std::array<double, kMetadataDim>;

/// Bit-exact text form (shortest round-trip decimal, comma separated).
std::string serialize_metadata(const MetadataVector& v);
MetadataVector parse_metadata(std::string_view s);

/// Hashtags and mentions of a post: the record's lists, or the caption's when empty.
textprep::Tags post_tags(const PostRecord& post);

struct MetadataInputs {
  const PostRecord& post;
  const ProfileRecord& profile;
  const similarity::SimilarityReport& report;
};

/// `reference_time` is epoch seconds; date_age_days = (reference - timestamp) / 86400.
MetadataVector build_metadata(const MetadataInputs& in, const textprep::TextResources& res,
                              const SentimentLexicon& lexicon, std::int64_t reference_time);

/// Ordered pieces of one corpus entry.
struct CorpusParts {
  TokenList caption;
  TokenList hashtags;   // segmented
  TokenList mentions;   // segmented
  TokenList biography;
  TokenList identity;   // segmented username then full name
  TokenList topic_words;
};

/// Single-space join of the parts in declaration order.
std::string fuse_corpus_entry(const CorpusParts& parts);
/// Post content only: caption, hashtags, mentions, topic words.
std::string fuse_post_entry(const CorpusParts& parts);

CorpusParts corpus_parts(const PostRecord& post, const ProfileRecord& profile, const textprep::TextResources& res);
std::string build_corpus_entry(const PostRecord& post, const ProfileRecord& profile,
                               const textprep::TextResources& res, std::span<const std::string> topic_words = {});

/// log1p on count-like columns, then z-score with training statistics.
struct MetadataScaler {
  VectorXd mean;
  VectorXd stddev;
  std::vector<bool> log_column;

  static std::vector<bool> default_log_columns();
  static MetadataScaler fit(const MatrixXd& raw);
  MatrixXd transform(const MatrixXd& raw) const;
};

}  // namespace impsense::features
