#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "impsense/textprep.hpp"

namespace testsupport {

inline const impsense::textprep::TextResources& resources() {
  static const auto res = impsense::textprep::TextResources::load(IMPSENSE_TEST_DATA_DIR);
  return res;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("impsense_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
