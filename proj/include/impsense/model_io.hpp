#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "impsense/features.hpp"
#include "impsense/nn.hpp"

namespace impsense::nn {

/// Everything needed to score a post besides the vocabulary file itself.
struct ModelBundle {
  ModelConfig config;
  ModelParams params;
  features::MetadataScaler scaler;
  std::string vocabulary_sha256;
  bool use_metadata = true;  // false: post-only model, post text and a zero metadata branch
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Container layout, all integers little-endian:
///   "IMPSENSE" (8 bytes) | u32 version | u64 header length | JSON header |
///   arrays as float64 LE, row-major, in header order.
/// The header lists the model config, vocabulary hash, and each array's name
/// and shape. Scaler statistics are stored as arrays (log flags as 0/1).
std::string serialize_model(const ModelBundle& bundle);
ModelBundle deserialize_model(std::string_view bytes);

void save_model(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace impsense::nn
