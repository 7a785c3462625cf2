#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "impsense/balance.hpp"
#include "impsense/clustering.hpp"
#include "impsense/eval.hpp"
#include "impsense/features.hpp"
#include "impsense/forest.hpp"
#include "impsense/lda.hpp"
#include "impsense/model_io.hpp"
#include "impsense/nn.hpp"
#include "impsense/similarity.hpp"
#include "impsense/synth.hpp"

namespace impsense::pipeline {

namespace fs = std::filesystem;

/// Stage settings. Loaded from a JSON tree; unknown keys are rejected.
struct PipelineConfig {
  fs::path data_dir;   // bundled text resources; empty: textprep default
  fs::path input_dir;  // genuine.jsonl, profiles.jsonl, posts.jsonl, photo_oracle.tsv
  fs::path lexicon;    // empty: <data_dir>/sentiment_lexicon.tsv
  std::uint64_t seed = 0;
  std::int64_t reference_time = 1609459200;  // 2021-01-01, for post age

  double threshold = similarity::kDefaultThreshold;

  int k_min = 1, k_max = 8, clusters = 2, restarts = 5;
  bool drop_outliers = false;
  double outlier_factor = 3.0;

  bool balance = true;
  int smote_k = 5;
  std::optional<std::uint64_t> balance_seed;  // overrides the stream derived from `seed`

  std::size_t vocab_cap = features::kDefaultVocabCap;
  int lda_topics = 10, lda_iterations = 200, topic_words = 3;

  nn::ModelConfig model;  // vocab_size and metadata_dim are set from data
  nn::TrainConfig train;

  double train_frac = 0.75;
  int folds = 10;
  int forest_trees = 100;
  std::size_t tfidf_vocab = 1000;

  synth::GeneratorConfig generator = synth::GeneratorConfig::defaults();

  static PipelineConfig parse(std::string_view json_text);
  static PipelineConfig load(const fs::path& path);
  std::string to_json() const;
  void validate() const;

  fs::path resolved_data_dir() const;
  fs::path resolved_lexicon() const;
};

// ---------------------------------------------------------------- inputs

struct Inputs {
  std::vector<ProfileRecord> genuine;
  std::vector<ProfileRecord> candidates;
  std::vector<PostRecord> posts;
  similarity::PhotoTableOracle oracle;
  std::optional<synth::GroundTruth> truth;  // set by test harnesses only; load_inputs never reads labels.csv
};

/// Reads the dataset directory; missing files are config errors.
Inputs load_inputs(const fs::path& dir, bool with_posts = true);

// ---------------------------------------------------------------- identify

struct IdentifyResult {
  std::vector<similarity::CandidateAssessment> candidates;  // aligned with Inputs::candidates
  std::vector<similarity::CandidateAssessment> genuine;     // each genuine account against the others
  std::vector<std::size_t> impersonators;                   // candidate indices judged impersonators
};

IdentifyResult identify(const Inputs& in, const PipelineConfig& cfg, const textprep::TextResources& res);
std::string identify_csv(const Inputs& in, const IdentifyResult& r);

// ---------------------------------------------------------------- cluster

struct ClusterResult {
  std::vector<std::size_t> members;  // candidate indices, row order of `raw`
  MatrixXd raw;                      // clustering features
  clustering::ElbowResult<double> elbow;
  clustering::ClusterModel<double> model;
  std::vector<clustering::PointReport<double>> points;
  std::map<std::string, PostClass> labels;  // username → bot / fan (outliers omitted when dropped)
};

ClusterResult cluster(const Inputs& in, const IdentifyResult& id, const PipelineConfig& cfg);
std::string assignments_csv(const Inputs& in, const ClusterResult& r);
std::string elbow_csv(const ClusterResult& r);

// ---------------------------------------------------------------- examples

/// One row per post whose publisher is a genuine account or a labeled impersonator.
struct ExampleSet {
  std::vector<std::string> post_ids;
  std::vector<std::string> corpus;       // fused post and profile text
  std::vector<std::string> post_corpus;  // post content only
  MatrixXd metadata;                // raw MetadataVector rows
  std::vector<int> labels;          // pipeline labels (genuine / cluster label)
  std::vector<int> truth;           // ground truth class, or -1 when unknown
  std::size_t skipped_posts = 0;    // publisher unknown or not identified
  features::TopicModel topics;
};

ExampleSet build_examples(const Inputs& in, const IdentifyResult& id, const ClusterResult& cl,
                          const PipelineConfig& cfg, const textprep::TextResources& res,
                          const features::SentimentLexicon& lexicon);

// ---------------------------------------------------------------- models

struct TrainedModel {
  nn::ModelBundle bundle;
  features::Vocabulary vocab;
  std::vector<double> loss_history;
  std::array<Eigen::Index, kNumClasses> class_counts{};  // after balancing
};

/// Vocabulary, scaler, balancing and training all see the `train` rows only.
/// `with_profile` false gives the post-only variant: post_corpus text and a
/// zero metadata branch.
TrainedModel fit_dnn(const ExampleSet& ex, std::span<const std::size_t> train, const PipelineConfig& cfg,
                     bool with_profile, std::uint64_t seed);
std::vector<int> predict_dnn(const TrainedModel& m, const ExampleSet& ex, std::span<const std::size_t> rows,
                             std::vector<VectorXd>* probs = nullptr);

/// TF-IDF over the post text + random forest, trained on the (balanced) train rows.
std::vector<int> forest_baseline(const ExampleSet& ex, std::span<const std::size_t> train,
                                 std::span<const std::size_t> test, const PipelineConfig& cfg, std::uint64_t seed);

/// Training rows after balancing, as indices into `ex` (synthetic rows repeat their source).
struct BalancedRows {
  std::vector<std::size_t> rows;
  MatrixXd metadata;  // scaled; synthetic rows are SMOTE points
  std::vector<int> labels;
  features::MetadataScaler scaler;
};
BalancedRows balanced_training_rows(const ExampleSet& ex, std::span<const std::size_t> train,
                                    const PipelineConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------- benchmark

inline constexpr std::array<std::string_view, 3> kBenchmarkModels{"rf_tfidf", "dnn_post", "dnn_post_profile"};

struct BenchmarkRow {
  std::string model;
  std::vector<eval::MetricsReport> folds;  // cross-validation on the training portion
  eval::MetricsReport test;                // held-out split
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  bool scored_against_truth = false;
};

/// Three rows: TF-IDF random forest, post-only DNN, and the full DNN.
/// `folds` = 0 skips cross-validation.
BenchmarkReport run_benchmark(const ExampleSet& ex, const eval::Split& split, const PipelineConfig& cfg, int folds);
std::string benchmark_csv(const BenchmarkReport& r);
std::string benchmark_table(const BenchmarkReport& r);
std::string fold_jsonl(const BenchmarkReport& r);

/// Labels to score against: ground truth when every row has it, else pipeline labels.
const std::vector<int>& scoring_labels(const ExampleSet& ex);

// ---------------------------------------------------------------- manifest

struct Manifest {
  std::string command;
  std::string config_json;
  std::map<std::string, std::string> inputs;   // path → sha256
  std::map<std::string, std::string> outputs;  // path → sha256
  std::map<std::string, std::string> notes;
  std::string started_at, finished_at;

  std::string to_json() const;
};

std::string file_sha256(const fs::path& path);
std::string utc_timestamp();

}  // namespace impsense::pipeline
