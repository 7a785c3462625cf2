#include "impsense/clustering.hpp"

#include "utf8.hpp"

namespace impsense::clustering {

ClusterFeatureVector build_cluster_features(const ProfileRecord& profile,
                                            const similarity::CandidateAssessment& assessment,
                                            std::span<const PostRecord> posts) {
  ClusterFeatureVector f{};
  const auto& r = assessment.best;
  f[kSimUsername] = r.sim_username;
  f[kSimFullName] = r.sim_full_name;
  f[kSimBiography] = r.sim_biography;
  f[kSimPhoto] = r.photo_similar ? 1.0 : 0.0;
  f[kHasExternalUrl] = profile.has_external_url ? 1.0 : 0.0;
  f[kMsf] = assessment.msf;
  f[kLsf] = assessment.lsf;

  if (!posts.empty()) {
    double likes = 0, comments = 0, caption_len = 0, tag_chars = 0, tag_count = 0;
    for (const auto& p : posts) {
      likes += static_cast<double>(p.like_count);
      comments += static_cast<double>(p.comment_count);
      caption_len += static_cast<double>(utf8::length(p.caption));
      for (const auto& h : p.hashtags) {
        tag_chars += static_cast<double>(utf8::length(h));
        tag_count += 1;
      }
    }
    const double n = static_cast<double>(posts.size());
    f[kAvgReceivedLike] = likes / n;
    f[kAvgReceivedComment] = comments / n;
    f[kAvgCaptionLength] = caption_len / n;
    f[kAvgHashtagLength] = tag_count > 0 ? tag_chars / tag_count : 0.0;
  }

  f[kAccountAgeDays] = static_cast<double>(profile.account_age_days);
  f[kFollowerCount] = static_cast<double>(profile.follower_count);
  f[kFolloweeCount] = static_cast<double>(profile.followee_count);
  f[kMediaCount] = static_cast<double>(profile.media_count);
  f[kIsPrivate] = profile.is_private ? 1.0 : 0.0;
  f[kIsVerified] = profile.is_verified ? 1.0 : 0.0;
  return f;
}

}  // namespace impsense::clustering
