#include "impsense/commands.hpp"

#include <cstdio>

#include <json.hpp>

#include "impsense/io.hpp"

namespace impsense::commands {
namespace {

using pipeline::PipelineConfig;

class Run {
 public:
  Run(std::string command, const PipelineConfig& cfg, fs::path out_dir) : out_dir_(std::move(out_dir)) {
    manifest_.command = std::move(command);
    manifest_.config_json = cfg.to_json();
    manifest_.started_at = pipeline::utc_timestamp();
  }

  void input(const fs::path& p) { manifest_.inputs[p.string()] = pipeline::file_sha256(p); }
  void output(const char* name, std::string_view content) {
    const fs::path p = out_dir_ / name;
    io::write_file_atomic(p, content);
    manifest_.outputs[p.string()] = sha256_hex(content);
  }
  void output_file(const fs::path& p) { manifest_.outputs[p.string()] = pipeline::file_sha256(p); }
  void note(const std::string& key, std::string value) { manifest_.notes[key] = std::move(value); }

  void finish() {
    manifest_.finished_at = pipeline::utc_timestamp();
    io::write_file_atomic(manifest_path(out_dir_, manifest_.command), manifest_.to_json());
  }

 private:
  fs::path out_dir_;
  pipeline::Manifest manifest_;
};

fs::path require_input_dir(const PipelineConfig& cfg) {
  if (cfg.input_dir.empty()) throw ConfigError("input_dir is not set (config key or --input-dir)");
  if (!fs::is_directory(cfg.input_dir)) throw ConfigError("input directory not found: " + cfg.input_dir.string());
  return cfg.input_dir;
}

pipeline::Inputs load(const PipelineConfig& cfg, Run& run, bool with_posts) {
  const fs::path dir = require_input_dir(cfg);
  auto in = pipeline::load_inputs(dir, with_posts);
  run.input(dir / synth::kGenuineFile);
  run.input(dir / synth::kProfilesFile);
  run.input(dir / synth::kPhotoOracleFile);
  if (with_posts) run.input(dir / synth::kPostsFile);
  return in;
}

// identify → cluster → examples, shared by train and eval.
struct Upstream {
  textprep::TextResources res;
  features::SentimentLexicon lexicon;
  pipeline::Inputs in;
  pipeline::IdentifyResult id;
  pipeline::ClusterResult cl;
  pipeline::ExampleSet ex;
};

Upstream upstream(const PipelineConfig& cfg, Run& run) {
  Upstream u{textprep::TextResources::load(cfg.resolved_data_dir()), features::SentimentLexicon::load(cfg.resolved_lexicon()),
             load(cfg, run, true), {}, {}, {}};
  u.id = pipeline::identify(u.in, cfg, u.res);
  u.cl = pipeline::cluster(u.in, u.id, cfg);
  u.ex = pipeline::build_examples(u.in, u.id, u.cl, cfg, u.res, u.lexicon);
  run.note("examples", std::to_string(u.ex.post_ids.size()));
  run.note("skipped_posts", std::to_string(u.ex.skipped_posts));
  run.note("impersonators", std::to_string(u.id.impersonators.size()));
  return u;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

}  // namespace

fs::path manifest_path(const fs::path& out_dir, std::string_view command) {
  return out_dir / ("manifest_" + std::string(command) + ".json");
}

void run_synth(const PipelineConfig& cfg, const fs::path& out_dir) {
  Run run("synth", cfg, out_dir);
  synth::GeneratorConfig g = cfg.generator;
  g.seed = cfg.seed;
  g.threshold = cfg.threshold;
  const auto res = textprep::TextResources::load(cfg.resolved_data_dir());
  const auto ds = synth::gen_dataset(g, res);
  synth::write_dataset(out_dir, ds);
  for (const char* f : {synth::kGenuineFile, synth::kProfilesFile, synth::kPostsFile, synth::kPhotoOracleFile,
                        synth::kLabelsFile})
    run.output_file(out_dir / f);
  run.finish();
}

void run_identify(const PipelineConfig& cfg, const fs::path& out_dir) {
  Run run("identify", cfg, out_dir);
  const auto res = textprep::TextResources::load(cfg.resolved_data_dir());
  const auto in = load(cfg, run, false);
  const auto id = pipeline::identify(in, cfg, res);
  run.note("impersonators", std::to_string(id.impersonators.size()));
  run.output(kSimilarityCsv, pipeline::identify_csv(in, id));
  run.finish();
}

void run_cluster(const PipelineConfig& cfg, const fs::path& out_dir) {
  Run run("cluster", cfg, out_dir);
  const auto res = textprep::TextResources::load(cfg.resolved_data_dir());
  const auto in = load(cfg, run, true);
  const auto id = pipeline::identify(in, cfg, res);
  const auto cl = pipeline::cluster(in, id, cfg);
  if (!cl.elbow.ks.empty()) run.note("elbow_k", std::to_string(cl.elbow.k_star));
  for (const auto& w : cl.model.warnings) run.note("warning", w);
  run.output(kAssignmentsCsv, pipeline::assignments_csv(in, cl));
  run.output(kElbowCsv, pipeline::elbow_csv(cl));
  run.finish();
}

void run_train(const PipelineConfig& cfg, const fs::path& out_dir) {
  Run run("train", cfg, out_dir);
  const auto u = upstream(cfg, run);
  const auto rows = all_rows(u.ex.post_ids.size());
  const auto m = pipeline::fit_dnn(u.ex, rows, cfg, true, derive_seed(cfg.seed, 30));

  run.output(kModelFile, nn::serialize_model(m.bundle));
  run.output(kVocabFile, m.vocab.serialize());
  run.output(kTopicsFile, u.ex.topics.topics() > 0 ? u.ex.topics.serialize() : std::string());
  std::string history = "epoch,loss\n";
  char line[64];
  for (std::size_t e = 0; e < m.loss_history.size(); ++e) {
    std::snprintf(line, sizeof line, "%zu,%.9f\n", e + 1, m.loss_history[e]);
    history += line;
  }
  run.output(kHistoryCsv, history);
  run.note("class_counts", std::to_string(m.class_counts[0]) + "/" + std::to_string(m.class_counts[1]) + "/" +
                               std::to_string(m.class_counts[2]));
  run.finish();
}

void run_eval(const PipelineConfig& cfg, const fs::path& out_dir) {
  Run run("eval", cfg, out_dir);
  const auto u = upstream(cfg, run);
  const auto split = eval::split(u.ex.labels, cfg.train_frac, derive_seed(cfg.seed, 40));
  const auto report = pipeline::run_benchmark(u.ex, split, cfg, cfg.folds);
  run.output(kReportCsv, pipeline::benchmark_csv(report));
  run.output(kReportTxt, pipeline::benchmark_table(report));
  run.output(kFoldsJsonl, pipeline::fold_jsonl(report));
  run.finish();
}

void run_predict(const PipelineConfig& cfg, const fs::path& out_dir, const fs::path& model_dir,
                 const fs::path& posts_path) {
  Run run("predict", cfg, out_dir);
  for (const char* f : {kModelFile, kVocabFile, kTopicsFile})
    if (!fs::exists(model_dir / f)) throw ConfigError("model file not found: " + (model_dir / f).string());
  if (!fs::exists(posts_path)) throw ConfigError("posts file not found: " + posts_path.string());

  pipeline::TrainedModel model;
  model.bundle = nn::load_model(model_dir / kModelFile);
  model.vocab = features::Vocabulary::load(model_dir / kVocabFile);
  if (model.vocab.sha256() != model.bundle.vocabulary_sha256)
    throw DataError("vocabulary does not match the model: " + (model_dir / kVocabFile).string());
  const std::string topics_text = io::read_file(model_dir / kTopicsFile);
  const auto topics = topics_text.empty() ? features::TopicModel{} : features::TopicModel::deserialize(topics_text);
  for (const char* f : {kModelFile, kVocabFile, kTopicsFile}) run.input(model_dir / f);

  const auto posts = io::read_posts(posts_path);
  run.input(posts_path);
  if (posts.empty()) {
    run.output(kPredictionsJsonl, "");
    run.finish();
    return;
  }

  const auto res = textprep::TextResources::load(cfg.resolved_data_dir());
  const auto lexicon = features::SentimentLexicon::load(cfg.resolved_lexicon());
  const auto in = load(cfg, run, false);

  struct Publisher {
    const ProfileRecord* profile;
    std::optional<similarity::CandidateAssessment> assessment;
  };
  std::map<std::string, Publisher> publishers;
  for (const auto& g : in.genuine) publishers[g.username] = {&g, std::nullopt};
  for (const auto& c : in.candidates) publishers.emplace(c.username, Publisher{&c, std::nullopt});

  pipeline::ExampleSet ex;
  std::vector<features::MetadataVector> meta;
  for (const auto& post : posts) {
    auto it = publishers.find(post.publisher_id);
    if (it == publishers.end()) throw DataError("post " + post.post_id + ": unknown publisher '" + post.publisher_id + "'");
    Publisher& pub = it->second;
    if (!pub.assessment) {
      if (in.genuine.size() < 2 && &in.genuine.front() == pub.profile)
        pub.assessment.emplace();
      else
        pub.assessment = similarity::assess_against_community(*pub.profile, in.genuine, in.oracle, cfg.threshold,
                                                               &res.emoji);
    }
    auto parts = features::corpus_parts(post, *pub.profile, res);
    if (topics.topics() > 0 && cfg.topic_words > 0) {
      const int t = topics.dominant_topic(parts.caption, cfg.lda_iterations, derive_seed(cfg.seed, fnv1a(post.post_id)));
      parts.topic_words = topics.top_words(t, static_cast<std::size_t>(cfg.topic_words));
    }
    ex.post_ids.push_back(post.post_id);
    ex.corpus.push_back(features::fuse_corpus_entry(parts));
    ex.post_corpus.push_back(features::fuse_post_entry(parts));
    meta.push_back(features::build_metadata({post, *pub.profile, pub.assessment->best}, res, lexicon,
                                            cfg.reference_time));
  }
  ex.metadata.resize(static_cast<Eigen::Index>(meta.size()), static_cast<Eigen::Index>(features::kMetadataDim));
  for (std::size_t i = 0; i < meta.size(); ++i)
    for (std::size_t j = 0; j < features::kMetadataDim; ++j)
      ex.metadata(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = meta[i][j];

  std::vector<VectorXd> probs;
  const auto labels = pipeline::predict_dnn(model, ex, all_rows(posts.size()), &probs);
  std::string out;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    nlohmann::ordered_json j = {{"post_id", ex.post_ids[i]},
                        {"label", to_string(class_from_index(labels[i]))},
                        {"probs", std::vector<double>(probs[i].data(), probs[i].data() + probs[i].size())}};
    out += j.dump() + "\n";
  }
  run.output(kPredictionsJsonl, out);
  run.finish();
}

}  // namespace impsense::commands
