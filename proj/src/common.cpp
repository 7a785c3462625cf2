#include "impsense/common.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace impsense {

std::string_view to_string(PostClass c) {
  switch (c) {
    case PostClass::bot:
      return "bot";
    case PostClass::fan:
      return "fan";
    case PostClass::genuine:
      return "genuine";
  }
  return "unknown";
}

PostClass parse_post_class(std::string_view s) {
  if (s == "bot") return PostClass::bot;
  if (s == "fan") return PostClass::fan;
  if (s == "genuine") return PostClass::genuine;
  throw DataError("unknown post class '" + std::string(s) + "'");
}

void ProfileRecord::validate() const {
  if (username.empty()) throw DataError("profile username is empty");
  if (follower_count < 0 || followee_count < 0 || media_count < 0 || account_age_days < 0)
    throw DataError("profile '" + username + "' has a negative count");
}

void PostRecord::validate() const {
  if (like_count < 0 || comment_count < 0 || emoji_count < 0)
    throw DataError("post '" + post_id + "' has a negative count");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over a mixed state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

}  // namespace impsense
