#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "impsense/common.hpp"
#include "impsense/similarity.hpp"
#include "impsense/textprep.hpp"

namespace impsense::synth {

enum class Separability { easy, hard };

/// Per-class distribution parameters. Count-valued profile fields are
/// log-normal with the given mean; engagement is gamma-Poisson.
struct ClassParams {
  double follower_mean = 0, follower_sigma = 0.6;
  double followee_mean = 0, followee_sigma = 0.4;
  double media_mean = 0, media_sigma = 0.5;
  double account_age_mean = 0, account_age_sigma = 0.4;
  double like_mean = 0, comment_mean = 0;
  double engagement_shape = 3.0;  // per-post gamma shape; profile multiplier uses 4
  double external_url_prob = 0;
  double duplicate_prob = 0;
  double hashtag_rate = 0, emoji_rate = 0, url_prob = 0, mention_prob = 0, tag_prob = 0, video_prob = 0;
  double name_cue_prob = 0;  // caption mentions the target celebrity's name
  int min_phrases = 2, max_phrases = 3;
  double post_share = 0;  // fraction of all posts
};

/// Similarity targets of one impersonator class. Fans draw each text metric
/// from Beta(mean, concentration). Bots pick one anchor metric that is
/// similar (U(anchor_low, anchor_high) or a photo match) and keep the others low.
struct SimilarityParams {
  double username = 0, full_name = 0, biography = 0, photo_rate = 0;
  double concentration = 8;
  bool anchored = false;
  std::array<double, 4> anchor_weights{};  // username, full name, biography, photo
  double anchor_low = 0.30, anchor_high = 0.50;
  double low_mean = 0.06;
};

struct GeneratorConfig {
  int n_genuine = 20;
  int n_fan = 160;
  int n_bot = 100;
  int n_posts = 3000;
  std::uint64_t seed = 0;
  Separability separability = Separability::easy;
  ClassParams genuine, fan, bot;
  SimilarityParams fan_sim, bot_sim;
  double genuine_follower_min = 157e3, genuine_follower_max = 197e6;
  double order_strength = 0.6;  // probability a caption phrase uses its class word order
  double cue_strength = 0.4;    // probability a hashtag, emoji or fan mention is class-specific
  std::int64_t time_begin = 1577836800;  // 2020-01-01
  std::int64_t time_end = 1609459200;    // 2021-01-01
  double threshold = similarity::kDefaultThreshold;

  static GeneratorConfig defaults(Separability s = Separability::easy);
  void validate() const;
};

struct GeneratedProfile {
  ProfileRecord profile;
  PostClass label = PostClass::bot;
  std::size_t target = 0;  // index into Population::genuine
};

struct Population {
  std::vector<ProfileRecord> genuine;
  std::vector<GeneratedProfile> impersonators;
  similarity::PhotoTableOracle oracle;
};

/// Genuine accounts plus fan and bot impersonators of them. The oracle holds a
/// verdict for every (candidate or genuine, genuine) photo pair.
Population gen_profiles(const GeneratorConfig& cfg, const textprep::TextResources& res);

/// What a publisher's posts may refer to.
struct PostContext {
  const ProfileRecord* target = nullptr;  // impersonated account, or nullptr
  std::span<const std::string> peers;     // usernames available for mentions
};

std::vector<PostRecord> gen_posts(const ProfileRecord& publisher, PostClass label, int n, const GeneratorConfig& cfg,
                                  const PostContext& ctx, std::uint64_t seed);

struct Dataset {
  Population population;
  std::vector<PostRecord> posts;
  std::vector<PostClass> post_labels;  // aligned with posts
};

/// Exactly cfg.n_posts posts split by class share; every profile posts at
/// least once when its class has enough posts.
Dataset gen_dataset(const GeneratorConfig& cfg, const textprep::TextResources& res);

/// File names inside a dataset directory.
inline constexpr const char* kGenuineFile = "genuine.jsonl";
inline constexpr const char* kProfilesFile = "profiles.jsonl";
inline constexpr const char* kPostsFile = "posts.jsonl";
inline constexpr const char* kPhotoOracleFile = "photo_oracle.tsv";
inline constexpr const char* kLabelsFile = "labels.csv";

/// Writes the five dataset files atomically. labels.csv rows are
/// `record,id,label` with record in {profile, post}.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);

struct GroundTruth {
  std::vector<std::pair<std::string, PostClass>> profiles;
  std::vector<std::pair<std::string, PostClass>> posts;
};
GroundTruth read_labels(const std::filesystem::path& path);

}  // namespace impsense::synth
