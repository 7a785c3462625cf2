#pragma once

#include <filesystem>

#include "impsense/pipeline.hpp"

namespace impsense::commands {

namespace fs = std::filesystem;

/// Output file names, relative to the command's output directory.
inline constexpr const char* kSimilarityCsv = "similarity.csv";
inline constexpr const char* kAssignmentsCsv = "assignments.csv";
inline constexpr const char* kElbowCsv = "elbow.csv";
inline constexpr const char* kModelFile = "model.bin";
inline constexpr const char* kVocabFile = "vocab.tsv";
inline constexpr const char* kTopicsFile = "topics.txt";
inline constexpr const char* kHistoryCsv = "history.csv";
inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kReportTxt = "report.txt";
inline constexpr const char* kFoldsJsonl = "folds.jsonl";
inline constexpr const char* kPredictionsJsonl = "predictions.jsonl";

/// Path of the manifest a command writes next to its outputs.
fs::path manifest_path(const fs::path& out_dir, std::string_view command);

// Each command reads cfg.input_dir (except synth), writes its outputs
// atomically under out_dir, then writes manifest_<command>.json.
void run_synth(const pipeline::PipelineConfig& cfg, const fs::path& out_dir);
void run_identify(const pipeline::PipelineConfig& cfg, const fs::path& out_dir);
void run_cluster(const pipeline::PipelineConfig& cfg, const fs::path& out_dir);
void run_train(const pipeline::PipelineConfig& cfg, const fs::path& out_dir);
void run_eval(const pipeline::PipelineConfig& cfg, const fs::path& out_dir);
/// Scores the posts file with the model in model_dir. Publishers are looked up
/// among the genuine and candidate profiles of cfg.input_dir.
void run_predict(const pipeline::PipelineConfig& cfg, const fs::path& out_dir, const fs::path& model_dir,
                 const fs::path& posts);

}  // namespace impsense::commands
