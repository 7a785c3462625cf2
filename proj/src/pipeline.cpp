#include "impsense/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <set>

#include <json.hpp>

#include "impsense/io.hpp"

namespace impsense::pipeline {
namespace {

using nlohmann::json;

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// Reads the listed keys of an object and rejects any other key.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError("config: unknown key '" + prefix() + key + "'");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: '" + prefix() + key + "' has the wrong type");
    }
  }
  void path(const char* key, fs::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }
  const json* child(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string prefix() const { return path_.empty() ? "" : path_ + "."; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_class_params(const json& j, const std::string& path, synth::ClassParams& c) {
  Reader r(j, path);
  r.get("follower_mean", c.follower_mean);
  r.get("follower_sigma", c.follower_sigma);
  r.get("followee_mean", c.followee_mean);
  r.get("media_mean", c.media_mean);
  r.get("like_mean", c.like_mean);
  r.get("comment_mean", c.comment_mean);
  r.get("engagement_shape", c.engagement_shape);
  r.get("duplicate_prob", c.duplicate_prob);
  r.get("hashtag_rate", c.hashtag_rate);
  r.get("post_share", c.post_share);
}

json class_params_json(const synth::ClassParams& c) {
  return {{"follower_mean", c.follower_mean}, {"follower_sigma", c.follower_sigma},
          {"followee_mean", c.followee_mean}, {"media_mean", c.media_mean},
          {"like_mean", c.like_mean},         {"comment_mean", c.comment_mean},
          {"engagement_shape", c.engagement_shape}, {"duplicate_prob", c.duplicate_prob},
          {"hashtag_rate", c.hashtag_rate},   {"post_share", c.post_share}};
}

}  // namespace

// ---------------------------------------------------------------- config

PipelineConfig PipelineConfig::parse(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  {
    Reader r(j, "");
    r.path("data_dir", c.data_dir);
    r.path("input_dir", c.input_dir);
    r.path("lexicon", c.lexicon);
    r.get("seed", c.seed);
    r.get("reference_time", c.reference_time);
    if (const json* s = r.child("similarity")) {
      Reader q(*s, "similarity");
      q.get("threshold", c.threshold);
    }
    if (const json* s = r.child("clustering")) {
      Reader q(*s, "clustering");
      q.get("k_min", c.k_min);
      q.get("k_max", c.k_max);
      q.get("k", c.clusters);
      q.get("restarts", c.restarts);
      q.get("drop_outliers", c.drop_outliers);
      q.get("outlier_factor", c.outlier_factor);
    }
    if (const json* s = r.child("balance")) {
      Reader q(*s, "balance");
      q.get("enabled", c.balance);
      q.get("smote_k", c.smote_k);
      std::uint64_t bs = 0;
      const bool has = s->contains("seed");
      q.get("seed", bs);
      if (has) c.balance_seed = bs;
    }
    if (const json* s = r.child("features")) {
      Reader q(*s, "features");
      q.get("vocab_cap", c.vocab_cap);
      q.get("seq_len", c.model.seq_len);
      q.get("lda_topics", c.lda_topics);
      q.get("lda_iterations", c.lda_iterations);
      q.get("topic_words", c.topic_words);
    }
    if (const json* s = r.child("model")) {
      Reader q(*s, "model");
      q.get("embed_dim", c.model.embed_dim);
      q.get("conv_filters", c.model.conv_filters);
      q.get("conv_kernel", c.model.conv_kernel);
      q.get("dropout", c.model.dropout_p);
      q.get("pool_size", c.model.pool_size);
      q.get("lstm_units", c.model.lstm_units);
      q.get("text_dense", c.model.text_dense);
      q.get("meta_dense", c.model.meta_dense);
      q.get("head_dense", c.model.head_dense);
    }
    if (const json* s = r.child("train")) {
      Reader q(*s, "train");
      q.get("learning_rate", c.train.learning_rate);
      q.get("beta1", c.train.beta1);
      q.get("beta2", c.train.beta2);
      q.get("epsilon", c.train.epsilon);
      q.get("batch_size", c.train.batch_size);
      q.get("epochs", c.train.epochs);
    }
    if (const json* s = r.child("eval")) {
      Reader q(*s, "eval");
      q.get("train_frac", c.train_frac);
      q.get("folds", c.folds);
      q.get("forest_trees", c.forest_trees);
      q.get("tfidf_vocab", c.tfidf_vocab);
    }
    if (const json* s = r.child("synth")) {
      Reader q(*s, "synth");
      std::string sep = c.generator.separability == synth::Separability::hard ? "hard" : "easy";
      q.get("separability", sep);
      if (sep != "easy" && sep != "hard") throw ConfigError("config: synth.separability must be 'easy' or 'hard'");
      const auto counts = c.generator;
      c.generator = synth::GeneratorConfig::defaults(sep == "hard" ? synth::Separability::hard
                                                                   : synth::Separability::easy);
      c.generator.n_genuine = counts.n_genuine;
      c.generator.n_fan = counts.n_fan;
      c.generator.n_bot = counts.n_bot;
      c.generator.n_posts = counts.n_posts;
      q.get("n_genuine", c.generator.n_genuine);
      q.get("n_fan", c.generator.n_fan);
      q.get("n_bot", c.generator.n_bot);
      q.get("n_posts", c.generator.n_posts);
      q.get("order_strength", c.generator.order_strength);
      q.get("cue_strength", c.generator.cue_strength);
      if (const json* p = q.child("fan")) read_class_params(*p, "synth.fan", c.generator.fan);
      if (const json* p = q.child("bot")) read_class_params(*p, "synth.bot", c.generator.bot);
      if (const json* p = q.child("genuine")) read_class_params(*p, "synth.genuine", c.generator.genuine);
    }
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse(io::read_file(path));
}

std::string PipelineConfig::to_json() const {
  json j;
  j["data_dir"] = data_dir.string();
  j["input_dir"] = input_dir.string();
  j["lexicon"] = lexicon.string();
  j["seed"] = seed;
  j["reference_time"] = reference_time;
  j["similarity"] = {{"threshold", threshold}};
  j["clustering"] = {{"k_min", k_min},         {"k_max", k_max},
                     {"k", clusters},          {"restarts", restarts},
                     {"drop_outliers", drop_outliers}, {"outlier_factor", outlier_factor}};
  j["balance"] = {{"enabled", balance}, {"smote_k", smote_k}};
  if (balance_seed) j["balance"]["seed"] = *balance_seed;
  j["features"] = {{"vocab_cap", vocab_cap},   {"seq_len", model.seq_len},
                   {"lda_topics", lda_topics}, {"lda_iterations", lda_iterations},
                   {"topic_words", topic_words}};
  j["model"] = {{"embed_dim", model.embed_dim},   {"conv_filters", model.conv_filters},
                {"conv_kernel", model.conv_kernel}, {"dropout", model.dropout_p},
                {"pool_size", model.pool_size},   {"lstm_units", model.lstm_units},
                {"text_dense", model.text_dense}, {"meta_dense", model.meta_dense},
                {"head_dense", model.head_dense}};
  j["train"] = {{"learning_rate", train.learning_rate}, {"beta1", train.beta1},
                {"beta2", train.beta2},                 {"epsilon", train.epsilon},
                {"batch_size", train.batch_size},       {"epochs", train.epochs}};
  j["eval"] = {{"train_frac", train_frac},
               {"folds", folds},
               {"forest_trees", forest_trees},
               {"tfidf_vocab", tfidf_vocab}};
  j["synth"] = {{"separability", generator.separability == synth::Separability::hard ? "hard" : "easy"},
                {"n_genuine", generator.n_genuine},
                {"n_fan", generator.n_fan},
                {"n_bot", generator.n_bot},
                {"n_posts", generator.n_posts},
                {"order_strength", generator.order_strength},
                {"cue_strength", generator.cue_strength},
                {"fan", class_params_json(generator.fan)},
                {"bot", class_params_json(generator.bot)},
                {"genuine", class_params_json(generator.genuine)}};
  return j.dump(2);
}

void PipelineConfig::validate() const {
  if (!(threshold > 0 && threshold <= 1)) throw ConfigError("config: similarity.threshold must lie in (0, 1]");
  if (k_min < 1 || k_max < k_min) throw ConfigError("config: clustering k range is invalid");
  if (clusters != 2) throw ConfigError("config: clustering.k must be 2 (bot/fan labeling)");
  if (restarts < 1) throw ConfigError("config: clustering.restarts must be >= 1");
  if (!(outlier_factor > 0)) throw ConfigError("config: clustering.outlier_factor must be positive");
  if (smote_k < 1) throw ConfigError("config: balance.smote_k must be >= 1");
  if (vocab_cap < 1) throw ConfigError("config: features.vocab_cap must be >= 1");
  if (lda_topics < 1 || lda_iterations < 0 || topic_words < 0) throw ConfigError("config: invalid LDA settings");
  if (!(train_frac > 0 && train_frac < 1)) throw ConfigError("config: eval.train_frac must lie in (0, 1)");
  if (folds < 0 || folds == 1) throw ConfigError("config: eval.folds must be 0 or >= 2");
  if (forest_trees < 1 || tfidf_vocab < 1) throw ConfigError("config: invalid forest settings");
  nn::ModelConfig m = model;
  m.metadata_dim = static_cast<int>(features::kMetadataDim);
  m.validate();
  train.validate();
  generator.validate();
}

fs::path PipelineConfig::resolved_data_dir() const {
  return data_dir.empty() ? textprep::TextResources::default_data_dir() : data_dir;
}

fs::path PipelineConfig::resolved_lexicon() const {
  return lexicon.empty() ? resolved_data_dir() / "sentiment_lexicon.tsv" : lexicon;
}

// ---------------------------------------------------------------- inputs

Inputs load_inputs(const fs::path& dir, bool with_posts) {
  auto need = [&](const char* name) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw ConfigError("input file not found: " + p.string());
    return p;
  };
  Inputs in;
  in.genuine = io::read_profiles(need(synth::kGenuineFile));
  in.candidates = io::read_profiles(need(synth::kProfilesFile));
  if (with_posts) in.posts = io::read_posts(need(synth::kPostsFile));
  in.oracle = similarity::PhotoTableOracle::load(need(synth::kPhotoOracleFile));
  if (in.genuine.empty()) throw DataError("no genuine accounts in " + (dir / synth::kGenuineFile).string());
  return in;
}

// ---------------------------------------------------------------- identify

IdentifyResult identify(const Inputs& in, const PipelineConfig& cfg, const textprep::TextResources& res) {
  IdentifyResult r;
  for (std::size_t i = 0; i < in.candidates.size(); ++i) {
    r.candidates.push_back(
        similarity::assess_against_community(in.candidates[i], in.genuine, in.oracle, cfg.threshold, &res.emoji));
    if (r.candidates.back().best.is_impersonator) r.impersonators.push_back(i);
  }
  for (const auto& g : in.genuine) {
    if (in.genuine.size() < 2) {
      r.genuine.emplace_back();
      continue;
    }
    r.genuine.push_back(similarity::assess_against_community(g, in.genuine, in.oracle, cfg.threshold, &res.emoji));
  }
  return r;
}

std::string identify_csv(const Inputs& in, const IdentifyResult& r) {
  std::string out =
      "username,genuine_target,sim_username,sim_full_name,sim_biography,photo_similar,similar_feature_count,msf,lsf,"
      "is_impersonator\n";
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto& a = r.candidates[i];
    out += in.candidates[i].username + "," + a.best.genuine_target + "," + fmt(a.best.sim_username) + "," +
           fmt(a.best.sim_full_name) + "," + fmt(a.best.sim_biography) + "," + (a.best.photo_similar ? "1" : "0") +
           "," + std::to_string(a.best.similar_feature_count) + "," + std::to_string(a.msf) + "," +
           std::to_string(a.lsf) + "," + (a.best.is_impersonator ? "1" : "0") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- cluster

ClusterResult cluster(const Inputs& in, const IdentifyResult& id, const PipelineConfig& cfg) {
  ClusterResult r;
  r.members = id.impersonators;
  if (r.members.size() < static_cast<std::size_t>(std::max(cfg.clusters, 2)))
    throw DataError("too few impersonators to cluster: " + std::to_string(r.members.size()));
  std::map<std::string, std::vector<PostRecord>> by_publisher;
  for (const auto& p : in.posts) by_publisher[p.publisher_id].push_back(p);

  r.raw.resize(static_cast<Eigen::Index>(r.members.size()), static_cast<Eigen::Index>(clustering::kNumClusterFeatures));
  for (std::size_t i = 0; i < r.members.size(); ++i) {
    const auto& profile = in.candidates[r.members[i]];
    auto it = by_publisher.find(profile.username);
    const std::span<const PostRecord> posts =
        it == by_publisher.end() ? std::span<const PostRecord>{} : std::span<const PostRecord>(it->second);
    const auto v = clustering::build_cluster_features(profile, id.candidates[r.members[i]], posts);
    for (std::size_t j = 0; j < v.size(); ++j) r.raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }

  const std::uint64_t seed = derive_seed(cfg.seed, 10);
  r.model = clustering::fit_clusters(r.raw, cfg.clusters, seed, cfg.restarts);
  clustering::label_clusters(r.model);
  const MatrixXd z = r.model.scaling.apply(r.raw);
  const int k_max = std::min<int>(cfg.k_max, static_cast<int>(r.members.size()));
  if (k_max - cfg.k_min + 1 >= 3) r.elbow = clustering::elbow_select(z, cfg.k_min, k_max, seed, cfg.restarts);
  r.points = clustering::point_reports(r.model, z, cfg.outlier_factor);
  for (std::size_t i = 0; i < r.members.size(); ++i) {
    const auto& pt = r.points[i];
    if (cfg.drop_outliers && pt.outlier) continue;
    r.labels[in.candidates[r.members[i]].username] = r.model.labels[static_cast<std::size_t>(pt.cluster)];
  }
  return r;
}

std::string assignments_csv(const Inputs& in, const ClusterResult& r) {
  std::string out = "profile_id,cluster,label,distance,outlier_flag\n";
  for (std::size_t i = 0; i < r.members.size(); ++i) {
    const auto& pt = r.points[i];
    out += in.candidates[r.members[i]].username + "," + std::to_string(pt.cluster) + "," +
           std::string(to_string(r.model.labels[static_cast<std::size_t>(pt.cluster)])) + "," + fmt(pt.distance) + "," +
           (pt.outlier ? "1" : "0") + "\n";
  }
  return out;
}

std::string elbow_csv(const ClusterResult& r) {
  std::string out = "k,wcss,chord_distance,selected\n";
  for (std::size_t i = 0; i < r.elbow.ks.size(); ++i)
    out += std::to_string(r.elbow.ks[i]) + "," + fmt(r.elbow.wcss[i]) + "," + fmt(r.elbow.chord_distance[i]) + "," +
           (r.elbow.ks[i] == r.elbow.k_star ? "1" : "0") + "\n";
  return out;
}

// ---------------------------------------------------------------- examples

ExampleSet build_examples(const Inputs& in, const IdentifyResult& id, const ClusterResult& cl,
                          const PipelineConfig& cfg, const textprep::TextResources& res,
                          const features::SentimentLexicon& lexicon) {
  struct Publisher {
    const ProfileRecord* profile;
    const similarity::CandidateAssessment* assessment;
    PostClass label;
  };
  std::map<std::string, Publisher> publishers;
  for (std::size_t i = 0; i < in.genuine.size(); ++i)
    publishers[in.genuine[i].username] = {&in.genuine[i], &id.genuine[i], PostClass::genuine};
  for (std::size_t i = 0; i < in.candidates.size(); ++i) {
    auto it = cl.labels.find(in.candidates[i].username);
    if (it != cl.labels.end()) publishers[in.candidates[i].username] = {&in.candidates[i], &id.candidates[i], it->second};
  }
  std::map<std::string, PostClass> truth;
  if (in.truth)
    for (const auto& [post, label] : in.truth->posts) truth[post] = label;

  ExampleSet ex;
  std::vector<features::CorpusParts> parts;
  std::vector<features::MetadataVector> meta;
  for (const auto& post : in.posts) {
    auto it = publishers.find(post.publisher_id);
    if (it == publishers.end()) {
      ++ex.skipped_posts;
      continue;
    }
    const Publisher& pub = it->second;
    parts.push_back(features::corpus_parts(post, *pub.profile, res));
    meta.push_back(features::build_metadata({post, *pub.profile, pub.assessment->best}, res, lexicon,
                                            cfg.reference_time));
    ex.post_ids.push_back(post.post_id);
    ex.labels.push_back(class_index(pub.label));
    auto t = truth.find(post.post_id);
    ex.truth.push_back(t == truth.end() ? -1 : class_index(t->second));
  }
  if (ex.post_ids.empty()) throw DataError("no posts from genuine accounts or identified impersonators");

  if (cfg.topic_words > 0) {
    std::vector<textprep::TokenList> docs;
    for (const auto& p : parts) docs.push_back(p.caption);
    ex.topics = features::lda_fit(docs, {cfg.lda_topics, -1.0, 0.01, cfg.lda_iterations}, derive_seed(cfg.seed, 50));
    for (std::size_t d = 0; d < parts.size(); ++d) {
      Eigen::Index t = 0;
      ex.topics.document_distribution(d).maxCoeff(&t);
      parts[d].topic_words = ex.topics.top_words(static_cast<int>(t), static_cast<std::size_t>(cfg.topic_words));
    }
  }
  ex.metadata.resize(static_cast<Eigen::Index>(meta.size()), static_cast<Eigen::Index>(features::kMetadataDim));
  for (std::size_t i = 0; i < meta.size(); ++i) {
    for (std::size_t j = 0; j < features::kMetadataDim; ++j)
      ex.metadata(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = meta[i][j];
    ex.corpus.push_back(features::fuse_corpus_entry(parts[i]));
    ex.post_corpus.push_back(features::fuse_post_entry(parts[i]));
  }
  return ex;
}

// ---------------------------------------------------------------- models

BalancedRows balanced_training_rows(const ExampleSet& ex, std::span<const std::size_t> train,
                                    const PipelineConfig& cfg, std::uint64_t seed) {
  if (train.empty()) throw DataError("empty training split");
  MatrixXd raw(static_cast<Eigen::Index>(train.size()), ex.metadata.cols());
  for (std::size_t i = 0; i < train.size(); ++i) raw.row(static_cast<Eigen::Index>(i)) = ex.metadata.row(static_cast<Eigen::Index>(train[i]));
  BalancedRows out;
  out.scaler = features::MetadataScaler::fit(raw);
  const MatrixXd scaled = out.scaler.transform(raw);
  if (!cfg.balance) {
    out.rows.assign(train.begin(), train.end());
    out.metadata = scaled;
    for (std::size_t r : train) out.labels.push_back(ex.labels[r]);
    return out;
  }
  balance::LabeledFeatureSet<double> set;
  set.features = scaled;
  for (std::size_t r : train) set.labels.push_back(class_from_index(ex.labels[r]));
  const auto bal = balance::balance(set, cfg.balance_seed ? *cfg.balance_seed : seed, {cfg.smote_k});
  out.metadata = bal.features;
  for (std::size_t i = 0; i < bal.labels.size(); ++i) {
    out.rows.push_back(train[static_cast<std::size_t>(bal.origin[i])]);
    out.labels.push_back(class_index(bal.labels[i]));
  }
  return out;
}

TrainedModel fit_dnn(const ExampleSet& ex, std::span<const std::size_t> train, const PipelineConfig& cfg,
                     bool with_profile, std::uint64_t seed) {
  TrainedModel m;
  const auto& text = with_profile ? ex.corpus : ex.post_corpus;
  std::vector<std::string> docs;
  for (std::size_t r : train) docs.push_back(text[r]);
  m.vocab = features::Vocabulary::fit(docs, cfg.vocab_cap);

  const BalancedRows br = balanced_training_rows(ex, train, cfg, derive_seed(seed, 1));
  for (int l : br.labels) ++m.class_counts[static_cast<std::size_t>(l)];

  nn::ModelConfig mc = cfg.model;
  mc.vocab_size = static_cast<int>(m.vocab.size());
  mc.metadata_dim = static_cast<int>(ex.metadata.cols());
  std::vector<nn::Example> data(br.rows.size());
  for (std::size_t i = 0; i < br.rows.size(); ++i) {
    data[i].tokens = features::encode(text[br.rows[i]], m.vocab, mc.seq_len);
    data[i].metadata = with_profile ? VectorXd(br.metadata.row(static_cast<Eigen::Index>(i)).transpose())
                                    : VectorXd::Zero(mc.metadata_dim);
    data[i].label = br.labels[i];
  }
  nn::TrainConfig tc = cfg.train;
  tc.seed = derive_seed(seed, 2);
  auto result = nn::train(data, mc, tc);
  m.loss_history = std::move(result.loss_history);
  m.bundle.config = mc;
  m.bundle.params = std::move(result.params);
  m.bundle.scaler = br.scaler;
  m.bundle.vocabulary_sha256 = m.vocab.sha256();
  m.bundle.use_metadata = with_profile;
  return m;
}

std::vector<int> predict_dnn(const TrainedModel& m, const ExampleSet& ex, std::span<const std::size_t> rows,
                             std::vector<VectorXd>* probs) {
  const auto& b = m.bundle;
  MatrixXd raw(static_cast<Eigen::Index>(rows.size()), ex.metadata.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) raw.row(static_cast<Eigen::Index>(i)) = ex.metadata.row(static_cast<Eigen::Index>(rows[i]));
  const MatrixXd scaled = rows.empty() ? raw : b.scaler.transform(raw);
  std::vector<int> out;
  if (probs) probs->clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto tokens = features::encode((b.use_metadata ? ex.corpus : ex.post_corpus)[rows[i]], m.vocab,
                                         b.config.seq_len);
    const VectorXd meta = b.use_metadata ? VectorXd(scaled.row(static_cast<Eigen::Index>(i)).transpose())
                                         : VectorXd::Zero(b.config.metadata_dim);
    const VectorXd p = nn::forward(b.params, b.config, tokens, meta, false, 0);
    out.push_back(nn::argmax(p));
    if (probs) probs->push_back(p);
  }
  return out;
}

std::vector<int> forest_baseline(const ExampleSet& ex, std::span<const std::size_t> train,
                                 std::span<const std::size_t> test, const PipelineConfig& cfg, std::uint64_t seed) {
  std::vector<std::string> fit_docs;
  for (std::size_t r : train) fit_docs.push_back(ex.post_corpus[r]);
  const auto tfidf = eval::Tfidf::fit(fit_docs, cfg.tfidf_vocab);
  const BalancedRows br = balanced_training_rows(ex, train, cfg, derive_seed(seed, 1));
  std::vector<std::string> train_docs, test_docs;
  for (std::size_t r : br.rows) train_docs.push_back(ex.post_corpus[r]);
  for (std::size_t r : test) test_docs.push_back(ex.post_corpus[r]);
  eval::ForestOptions opts;
  opts.trees = cfg.forest_trees;
  const auto forest = eval::forest_train(tfidf.transform(train_docs), br.labels, opts, derive_seed(seed, 3));
  return eval::forest_predict(forest, tfidf.transform(test_docs));
}

// ---------------------------------------------------------------- benchmark

const std::vector<int>& scoring_labels(const ExampleSet& ex) {
  const bool complete = std::all_of(ex.truth.begin(), ex.truth.end(), [](int t) { return t >= 0; });
  return complete && !ex.truth.empty() ? ex.truth : ex.labels;
}

BenchmarkReport run_benchmark(const ExampleSet& ex, const eval::Split& split, const PipelineConfig& cfg, int folds) {
  BenchmarkReport report;
  const auto& truth = scoring_labels(ex);
  report.scored_against_truth = &truth == &ex.truth;
  for (auto name : kBenchmarkModels) report.rows.push_back({std::string(name), {}, {}});

  auto score = [&](std::span<const std::size_t> train, std::span<const std::size_t> test, std::uint64_t seed,
                   std::array<eval::MetricsReport, 3>& out) {
    std::vector<int> want;
    for (std::size_t r : test) want.push_back(truth[r]);
    out[0] = eval::metrics(forest_baseline(ex, train, test, cfg, derive_seed(seed, 0)), want);
    out[1] = eval::metrics(predict_dnn(fit_dnn(ex, train, cfg, false, derive_seed(seed, 1)), ex, test), want);
    out[2] = eval::metrics(predict_dnn(fit_dnn(ex, train, cfg, true, derive_seed(seed, 1)), ex, test), want);
  };

  if (folds > 0) {
    std::vector<int> train_labels;
    for (std::size_t r : split.train) train_labels.push_back(ex.labels[r]);
    const auto fs = eval::kfold(train_labels, folds, derive_seed(cfg.seed, 70));
    for (std::size_t f = 0; f < fs.size(); ++f) {
      std::vector<std::size_t> tr, va;
      for (std::size_t i : fs[f].train) tr.push_back(split.train[i]);
      for (std::size_t i : fs[f].validation) va.push_back(split.train[i]);
      std::array<eval::MetricsReport, 3> m;
      score(tr, va, derive_seed(cfg.seed, 100 + f), m);
      for (std::size_t k = 0; k < 3; ++k) report.rows[k].folds.push_back(std::move(m[k]));
    }
  }
  std::array<eval::MetricsReport, 3> m;
  score(split.train, split.test, derive_seed(cfg.seed, 80), m);
  for (std::size_t k = 0; k < 3; ++k) report.rows[k].test = std::move(m[k]);
  return report;
}

namespace {

struct MetricColumn {
  const char* name;
  double (*get)(const eval::MetricsReport&);
};
constexpr std::array<MetricColumn, 4> kColumns{{
    {"accuracy", [](const eval::MetricsReport& m) { return m.accuracy; }},
    {"precision", [](const eval::MetricsReport& m) { return m.macro_precision; }},
    {"recall", [](const eval::MetricsReport& m) { return m.macro_recall; }},
    {"f1", [](const eval::MetricsReport& m) { return m.macro_f1; }},
}};

eval::MetricSummary fold_summary(const BenchmarkRow& row, const MetricColumn& col) {
  std::vector<double> v;
  for (const auto& f : row.folds) v.push_back(col.get(f));
  return eval::summarize(v);
}

}  // namespace

std::string benchmark_csv(const BenchmarkReport& r) {
  std::string out = "model,metric,cv_mean,cv_std,test\n";
  for (const auto& row : r.rows)
    for (const auto& col : kColumns) {
      std::string cv = ",";
      if (!row.folds.empty()) {
        const auto s = fold_summary(row, col);
        cv = fmt(s.mean) + "," + fmt(s.stddev);
      }
      out += row.model + "," + col.name + "," + cv + "," + fmt(col.get(row.test)) + "\n";
    }
  return out;
}

std::string benchmark_table(const BenchmarkReport& r) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-18s %-19s %-19s %-19s %-19s\n", "model", "accuracy", "precision", "recall",
                "f1");
  out += line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-18s", row.model.c_str());
    out += line;
    for (const auto& col : kColumns) {
      if (row.folds.empty()) {
        std::snprintf(line, sizeof line, "     n/a     [%.3f]", col.get(row.test));
      } else {
        const auto s = fold_summary(row, col);
        std::snprintf(line, sizeof line, " %.3f±%.3f [%.3f]", s.mean, s.stddev, col.get(row.test));
      }
      out += line;
    }
    out += "\n";
  }
  out += "cells: cross-validation mean±std [held-out test]; rf_tfidf and dnn_post see post content only\n";
  out += r.scored_against_truth ? "scored against ground-truth labels\n" : "scored against pipeline labels\n";
  return out;
}

std::string fold_jsonl(const BenchmarkReport& r) {
  std::string out;
  for (const auto& row : r.rows) {
    auto emit = [&](const std::string& fold, const eval::MetricsReport& m) {
      json j = {{"model", row.model},
                {"fold", fold},
                {"accuracy", m.accuracy},
                {"precision", m.macro_precision},
                {"recall", m.macro_recall},
                {"f1", m.macro_f1}};
      out += j.dump() + "\n";
    };
    for (std::size_t f = 0; f < row.folds.size(); ++f) emit(std::to_string(f), row.folds[f]);
    emit("test", row.test);
  }
  return out;
}

// ---------------------------------------------------------------- manifest

std::string Manifest::to_json() const {
  json j;
  j["command"] = command;
  j["config"] = json::parse(config_json);
  j["config_sha256"] = sha256_hex(config_json);
  j["stage_versions"] = {{"model_format", nn::kModelFormatVersion}, {"pipeline", 1}};
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["notes"] = notes;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  return j.dump(2) + "\n";
}

std::string file_sha256(const fs::path& path) { return sha256_hex(io::read_file(path)); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace impsense::pipeline
