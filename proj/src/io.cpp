#include "impsense/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace impsense::io {
namespace {

using nlohmann::json;

template <typename T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw DataError(std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T field_or(const json& j, const char* name, T fallback) {
  return j.contains(name) && !j.at(name).is_null() ? field<T>(j, name) : fallback;
}

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("expected a JSON object");
  return j;
}

template <typename Record, typename Parse>
std::vector<Record> read_lines(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const Error& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string to_json_line(const ProfileRecord& p) {
  json j = {{"username", p.username},
            {"full_name", p.full_name},
            {"biography", p.biography},
            {"follower_count", p.follower_count},
            {"followee_count", p.followee_count},
            {"media_count", p.media_count},
            {"is_private", p.is_private},
            {"is_verified", p.is_verified},
            {"has_external_url", p.has_external_url},
            {"account_age_days", p.account_age_days}};
  j["photo_id"] = p.photo_id ? json(*p.photo_id) : json(nullptr);
  return j.dump();
}

std::string to_json_line(const PostRecord& p) {
  json j = {{"post_id", p.post_id},
            {"caption", p.caption},
            {"hashtags", p.hashtags},
            {"mentions", p.mentions},
            {"tagged_users", p.tagged_users},
            {"like_count", p.like_count},
            {"comment_count", p.comment_count},
            {"media_type", p.media_type == MediaType::video ? "video" : "image"},
            {"emoji_count", p.emoji_count},
            {"has_url", p.has_url},
            {"timestamp", p.timestamp},
            {"publisher_id", p.publisher_id}};
  return j.dump();
}

ProfileRecord parse_profile(std::string_view line) {
  const json j = parse_object(line);
  ProfileRecord p;
  p.username = field<std::string>(j, "username");
  p.full_name = field_or<std::string>(j, "full_name", "");
  p.biography = field_or<std::string>(j, "biography", "");
  p.follower_count = field<std::int64_t>(j, "follower_count");
  p.followee_count = field<std::int64_t>(j, "followee_count");
  p.media_count = field<std::int64_t>(j, "media_count");
  p.is_private = field_or(j, "is_private", false);
  p.is_verified = field_or(j, "is_verified", false);
  p.has_external_url = field_or(j, "has_external_url", false);
  p.account_age_days = field_or<std::int64_t>(j, "account_age_days", 0);
  if (j.contains("photo_id") && !j.at("photo_id").is_null()) p.photo_id = field<std::string>(j, "photo_id");
  p.validate();
  return p;
}

PostRecord parse_post(std::string_view line) {
  const json j = parse_object(line);
  PostRecord p;
  p.post_id = field<std::string>(j, "post_id");
  p.caption = field_or<std::string>(j, "caption", "");
  p.hashtags = field_or<std::vector<std::string>>(j, "hashtags", {});
  p.mentions = field_or<std::vector<std::string>>(j, "mentions", {});
  p.tagged_users = field_or<std::vector<std::string>>(j, "tagged_users", {});
  p.like_count = field<std::int64_t>(j, "like_count");
  p.comment_count = field<std::int64_t>(j, "comment_count");
  const auto media = field_or<std::string>(j, "media_type", "image");
  if (media == "image") {
    p.media_type = MediaType::image;
  } else if (media == "video") {
    p.media_type = MediaType::video;
  } else {
    throw DataError("media_type must be 'image' or 'video'");
  }
  p.emoji_count = field_or<std::int64_t>(j, "emoji_count", 0);
  p.has_url = field_or(j, "has_url", false);
  p.timestamp = field<std::int64_t>(j, "timestamp");
  p.publisher_id = field<std::string>(j, "publisher_id");
  p.validate();
  return p;
}

std::vector<ProfileRecord> read_profiles(const std::filesystem::path& path) {
  return read_lines<ProfileRecord>(path, parse_profile);
}

std::vector<PostRecord> read_posts(const std::filesystem::path& path) {
  return read_lines<PostRecord>(path, parse_post);
}

void write_profiles(const std::filesystem::path& path, const std::vector<ProfileRecord>& profiles) {
  std::string out;
  for (const auto& p : profiles) out += to_json_line(p) + '\n';
  write_file_atomic(path, out);
}

void write_posts(const std::filesystem::path& path, const std::vector<PostRecord>& posts) {
  std::string out;
  for (const auto& p : posts) out += to_json_line(p) + '\n';
  write_file_atomic(path, out);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace impsense::io
