#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "impsense/common.hpp"

namespace impsense::io {

/// One JSON object per record; field names mirror the struct members.
std::string to_json_line(const ProfileRecord& p);
std::string to_json_line(const PostRecord& p);
ProfileRecord parse_profile(std::string_view line);
PostRecord parse_post(std::string_view line);

/// Reads every non-blank line. A malformed or invalid line raises a DataError
/// naming the file and line number, and nothing is returned.
std::vector<ProfileRecord> read_profiles(const std::filesystem::path& path);
std::vector<PostRecord> read_posts(const std::filesystem::path& path);

void write_profiles(const std::filesystem::path& path, const std::vector<ProfileRecord>& profiles);
void write_posts(const std::filesystem::path& path, const std::vector<PostRecord>& posts);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace impsense::io
