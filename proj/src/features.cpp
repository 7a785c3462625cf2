#include "impsense/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace impsense::features {
namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < s.size();) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\n' || s[j] == '\r')) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

void append(TokenList& dst, const TokenList& src) { dst.insert(dst.end(), src.begin(), src.end()); }

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

double signed_log1p(double x) { return x < 0 ? -std::log1p(-x) : std::log1p(x); }

}  // namespace

// ---------------------------------------------------------------- vocabulary

Vocabulary Vocabulary::fit(std::span<const std::string> corpus, std::size_t cap) {
  if (corpus.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");
  struct Stat {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  std::vector<std::string> order;
  std::size_t position = 0;
  for (const auto& doc : corpus) {
    for (std::string_view tok : split_ws(doc)) {
      auto [it, inserted] = stats.try_emplace(std::string(tok));
      if (inserted) {
        it->second.first = position;
        order.emplace_back(tok);
      }
      ++it->second.count;
      ++position;
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const Stat& sa = stats.at(a);
    const Stat& sb = stats.at(b);
    if (sa.count != sb.count) return sa.count > sb.count;
    return sa.first < sb.first;
  });
  if (order.size() > cap) order.resize(cap);
  Vocabulary v;
  v.tokens_ = std::move(order);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) v.index_.emplace(v.tokens_[i], static_cast<int>(i) + 1);
  return v;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\t';
    out += std::to_string(i + 1);
    out += '\n';
  }
  return out;
}

std::string Vocabulary::sha256() const { return sha256_hex(serialize()); }

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary " + path.string());
  out << serialize();
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vocabulary " + path.string());
  Vocabulary v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError(path.string() + ":" + std::to_string(lineno) + ": missing TAB");
    const int idx = std::stoi(line.substr(tab + 1));
    if (idx != static_cast<int>(v.tokens_.size()) + 1)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": indices must be contiguous from 1");
    v.tokens_.push_back(line.substr(0, tab));
    v.index_.emplace(v.tokens_.back(), idx);
  }
  return v;
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? oov_id() : it->second;
}

const std::string& Vocabulary::token(int id) const {
  static const std::string kEmpty;
  if (id < 1 || id > static_cast<int>(tokens_.size())) return kEmpty;
  return tokens_[static_cast<std::size_t>(id - 1)];
}

std::vector<int> encode(std::string_view text, const Vocabulary& vocab, int length) {
  if (length < 0) throw ConfigError("sequence length must be non-negative");
  std::vector<int> kept;
  for (std::string_view tok : split_ws(text)) {
    if (kept.size() >= static_cast<std::size_t>(length)) break;
    kept.push_back(vocab.id(tok));
  }
  std::vector<int> ids(static_cast<std::size_t>(length) - kept.size(), 0);
  ids.insert(ids.end(), kept.begin(), kept.end());
  return ids;
}

TokenList decode(std::span<const int> ids, const Vocabulary& vocab) {
  TokenList out;
  for (int id : ids)
    if (id >= 1 && id <= static_cast<int>(vocab.size())) out.push_back(vocab.token(id));
  return out;
}

// ---------------------------------------------------------------- sentiment

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sentiment lexicon " + path.string());
  SentimentLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path.string() + ":" + std::to_string(lineno) + ": missing TAB");
    lex.set(line.substr(0, tab), std::stod(line.substr(tab + 1)));
  }
  return lex;
}

void SentimentLexicon::set(std::string word, double valence) {
  values_[std::move(word)] = std::clamp(valence, -1.0, 1.0);
}

const double* SentimentLexicon::valence(std::string_view word) const {
  auto it = values_.find(std::string(word));
  return it == values_.end() ? nullptr : &it->second;
}

double sentiment(std::span<const std::string> tokens, const SentimentLexicon& lexicon) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (const auto& t : tokens) {
    if (const double* v = lexicon.valence(t)) {
      sum += *v;
      ++hits;
    }
  }
  return hits ? sum / static_cast<double>(hits) : 0.0;
}

double ratio(double numerator, double denominator) {
  return denominator == 0.0 ? numerator / (denominator + 1.0) : numerator / denominator;
}

// ---------------------------------------------------------------- metadata

std::string serialize_metadata(const MetadataVector& v) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v[i]);
    out.append(buf, end);
  }
  return out;
}

MetadataVector parse_metadata(std::string_view s) {
  MetadataVector v{};
  std::size_t field = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  while (field < v.size()) {
    auto [next, ec] = std::from_chars(p, end, v[field]);
    if (ec != std::errc()) throw DataError("malformed metadata vector");
    ++field;
    p = next;
    if (field < v.size()) {
      if (p == end || *p != ',') throw DataError("metadata vector has too few fields");
      ++p;
    }
  }
  if (p != end) throw DataError("metadata vector has too many fields");
  return v;
}

textprep::Tags post_tags(const PostRecord& post) {
  textprep::Tags tags;
  if (post.hashtags.empty() || post.mentions.empty()) tags = textprep::extract_tags(textprep::replace_entities(post.caption));
  if (!post.hashtags.empty()) tags.hashtags = post.hashtags;
  if (!post.mentions.empty()) tags.mentions = post.mentions;
  for (auto& t : tags.hashtags) t = lower(t);
  for (auto& t : tags.mentions) t = lower(t);
  return tags;
}

MetadataVector build_metadata(const MetadataInputs& in, const textprep::TextResources& res,
                              const SentimentLexicon& lexicon, std::int64_t reference_time) {
  const PostRecord& post = in.post;
  const ProfileRecord& profile = in.profile;
  const auto tags = post_tags(post);

  const std::string caption_text = textprep::demojize(textprep::replace_entities(post.caption), res.emoji);
  const TokenList caption_words = textprep::normalize(caption_text, res.stopwords, {});
  TokenList hashtag_words;
  for (const auto& h : tags.hashtags) append(hashtag_words, textprep::segment_identifier(h, res.dictionary));

  MetadataVector v{};
  v[kLikeCount] = static_cast<double>(post.like_count);
  v[kCommentCount] = static_cast<double>(post.comment_count);
  v[kTaggedUsersCount] = static_cast<double>(post.tagged_users.size());
  v[kMentionUsersCount] = static_cast<double>(tags.mentions.size());
  v[kHashtagCount] = static_cast<double>(tags.hashtags.size());
  v[kCaptionSentiment] = sentiment(caption_words, lexicon);
  v[kHashtagSentiment] = sentiment(hashtag_words, lexicon);
  v[kMediaType] = post.media_type == MediaType::video ? 1.0 : 0.0;
  v[kEmojiCount] = static_cast<double>(post.emoji_count);
  v[kHasUrl] = post.has_url ? 1.0 : 0.0;
  v[kDateAgeDays] = static_cast<double>(reference_time - post.timestamp) / 86400.0;
  v[kSimUsername] = in.report.sim_username;
  v[kSimFullName] = in.report.sim_full_name;
  v[kSimBiography] = in.report.sim_biography;
  v[kSimPhoto] = in.report.photo_similar ? 1.0 : 0.0;
  v[kFollower] = static_cast<double>(profile.follower_count);
  v[kFollowee] = static_cast<double>(profile.followee_count);
  v[kPostCount] = static_cast<double>(profile.media_count);
  v[kFollowingFollowersRatio] = ratio(v[kFollowee], v[kFollower]);
  v[kFollowersPostsRatio] = ratio(v[kFollower], v[kPostCount]);
  v[kBioEmojiCount] = static_cast<double>(textprep::count_emoji(profile.biography));
  v[kBioHashtagCount] = static_cast<double>(textprep::extract_tags(profile.biography).hashtags.size());
  return v;
}

// ---------------------------------------------------------------- corpus

std::string fuse_corpus_entry(const CorpusParts& parts) {
  TokenList all;
  append(all, parts.caption);
  append(all, parts.hashtags);
  append(all, parts.mentions);
  append(all, parts.biography);
  append(all, parts.identity);
  append(all, parts.topic_words);
  return textprep::join(all);
}

std::string fuse_post_entry(const CorpusParts& parts) {
  TokenList all;
  append(all, parts.caption);
  append(all, parts.hashtags);
  append(all, parts.mentions);
  append(all, parts.topic_words);
  return textprep::join(all);
}

CorpusParts corpus_parts(const PostRecord& post, const ProfileRecord& profile, const textprep::TextResources& res) {
  CorpusParts parts;
  parts.caption = textprep::prepare(post.caption, res).tokens;
  const auto tags = post_tags(post);
  for (const auto& h : tags.hashtags) append(parts.hashtags, textprep::segment_identifier(h, res.dictionary));
  for (const auto& m : tags.mentions) append(parts.mentions, textprep::segment_identifier(m, res.dictionary));
  parts.biography = textprep::prepare(profile.biography, res).tokens;
  append(parts.identity, textprep::segment_identifier(profile.username, res.dictionary));
  append(parts.identity, textprep::segment_identifier(lower(profile.full_name), res.dictionary));
  return parts;
}

std::string build_corpus_entry(const PostRecord& post, const ProfileRecord& profile,
                               const textprep::TextResources& res, std::span<const std::string> topic_words) {
  CorpusParts parts = corpus_parts(post, profile, res);
  parts.topic_words.assign(topic_words.begin(), topic_words.end());
  return fuse_corpus_entry(parts);
}

// ---------------------------------------------------------------- scaler

std::vector<bool> MetadataScaler::default_log_columns() {
  std::vector<bool> log(kMetadataDim, false);
  for (std::size_t f : {kLikeCount, kCommentCount, kTaggedUsersCount, kMentionUsersCount, kHashtagCount, kEmojiCount,
                        kDateAgeDays, kFollower, kFollowee, kPostCount, kFollowingFollowersRatio,
                        kFollowersPostsRatio, kBioEmojiCount, kBioHashtagCount})
    log[f] = true;
  return log;
}

MetadataScaler MetadataScaler::fit(const MatrixXd& raw) {
  if (raw.rows() < 1) throw DataError("cannot fit metadata scaling on zero rows");
  MetadataScaler s;
  s.log_column = raw.cols() == static_cast<Eigen::Index>(kMetadataDim)
                     ? default_log_columns()
                     : std::vector<bool>(static_cast<std::size_t>(raw.cols()), false);
  s.mean = VectorXd::Zero(raw.cols());
  s.stddev = VectorXd::Ones(raw.cols());
  MatrixXd t = raw;
  for (Eigen::Index j = 0; j < t.cols(); ++j)
    if (s.log_column[static_cast<std::size_t>(j)]) t.col(j) = t.col(j).unaryExpr(&signed_log1p);
  s.mean = t.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    const double var = (t.col(j).array() - s.mean(j)).square().mean();
    s.stddev(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

MatrixXd MetadataScaler::transform(const MatrixXd& raw) const {
  if (raw.cols() != mean.size()) throw DataError("metadata width does not match the scaler");
  MatrixXd t = raw;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    if (log_column[static_cast<std::size_t>(j)]) t.col(j) = t.col(j).unaryExpr(&signed_log1p);
    t.col(j) = (t.col(j).array() - mean(j)) / stddev(j);
  }
  if (!t.allFinite()) throw NumericError("non-finite metadata after scaling");
  return t;
}

}  // namespace impsense::features
