#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace impsense {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Errors carry the process exit code the CLI reports for them.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what, 3) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what, 4) {}
};

/// Post type. Index order is the classifier's output order.
enum class PostClass : int { bot = 0, fan = 1, genuine = 2 };
inline constexpr int kNumClasses = 3;

std::string_view to_string(PostClass c);
PostClass parse_post_class(std::string_view s);
inline int class_index(PostClass c) { return static_cast<int>(c); }
inline PostClass class_from_index(int i) { return static_cast<PostClass>(i); }

struct ProfileRecord {
  std::string username;
  std::string full_name;
  std::string biography;
  std::int64_t follower_count = 0;
  std::int64_t followee_count = 0;
  std::int64_t media_count = 0;
  bool is_private = false;
  bool is_verified = false;
  bool has_external_url = false;
  std::int64_t account_age_days = 0;
  std::optional<std::string> photo_id;

  /// Throws DataError when an invariant is violated.
  void validate() const;
};

enum class MediaType { image, video };

struct PostRecord {
  std::string post_id;
  std::string caption;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::vector<std::string> tagged_users;
  std::int64_t like_count = 0;
  std::int64_t comment_count = 0;
  MediaType media_type = MediaType::image;
  std::int64_t emoji_count = 0;
  bool has_url = false;
  std::int64_t timestamp = 0;
  std::string publisher_id;

  void validate() const;
};

/// Deterministic 64-bit seed derivation for (seed, stream) pairs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// 64-bit FNV-1a, for seeding streams by string keys.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace impsense
