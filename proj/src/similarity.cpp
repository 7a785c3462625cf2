#include "impsense/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "impsense/io.hpp"
#include "utf8.hpp"

namespace impsense::similarity {
namespace {

std::vector<std::uint64_t> bigram_set(std::string_view s) {
  std::vector<char32_t> cps;
  cps.reserve(s.size());
  for (char32_t cp : utf8::decode(s)) {
    if (cp == '_' || cp == '.' || cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v')
      continue;
    if (cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
    cps.push_back(cp);
  }
  std::vector<std::uint64_t> grams;
  if (cps.size() < 2) return grams;
  grams.reserve(cps.size() - 1);
  for (std::size_t i = 0; i + 1 < cps.size(); ++i)
    grams.push_back((static_cast<std::uint64_t>(cps[i]) << 32) | static_cast<std::uint64_t>(cps[i + 1]));
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

}  // namespace

double text_cosine(std::string_view a, std::string_view b) {
  const auto ga = bigram_set(a);
  const auto gb = bigram_set(b);
  if (ga.empty() || gb.empty()) return 0.0;
  std::size_t shared = 0;
  for (std::size_t i = 0, j = 0; i < ga.size() && j < gb.size();) {
    if (ga[i] < gb[j]) {
      ++i;
    } else if (gb[j] < ga[i]) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  const double denom = std::sqrt(static_cast<double>(ga.size()) * static_cast<double>(gb.size()));
  return std::min(1.0, static_cast<double>(shared) / denom);
}

PhotoTableOracle::PhotoTableOracle(const PhotoTableOracle& other) : table_(other.table_), misses_(other.misses()) {}

PhotoTableOracle& PhotoTableOracle::operator=(const PhotoTableOracle& other) {
  if (this != &other) {
    table_ = other.table_;
    misses_ = other.misses();
  }
  return *this;
}

PhotoTableOracle PhotoTableOracle::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open photo oracle file " + path.string());
  PhotoTableOracle oracle;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected three tab-separated fields");
    const std::string flag = line.substr(t2 + 1);
    if (flag != "0" && flag != "1")
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": verdict must be 0 or 1");
    oracle.set(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), flag == "1");
  }
  return oracle;
}

void PhotoTableOracle::save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& [key, similar] : table_) out += key.first + '\t' + key.second + '\t' + (similar ? "1\n" : "0\n");
  io::write_file_atomic(path, out);
}

void PhotoTableOracle::set(const std::string& a, const std::string& b, bool similar) {
  table_[a <= b ? std::make_pair(a, b) : std::make_pair(b, a)] = similar;
}

std::optional<bool> PhotoTableOracle::lookup(const std::string& a, const std::string& b) const {
  auto it = table_.find(a <= b ? std::make_pair(a, b) : std::make_pair(b, a));
  if (it == table_.end()) {
    misses_.fetch_add(1);
    return std::nullopt;
  }
  return it->second;
}

bool photo_similar(const ProfileRecord& candidate, const ProfileRecord& genuine, const PhotoOracle& oracle) {
  if (!candidate.photo_id || !genuine.photo_id) return false;
  return oracle.lookup(*candidate.photo_id, *genuine.photo_id).value_or(false);
}

SimilarityReport assess_profile(const ProfileRecord& candidate, const ProfileRecord& genuine,
                                const PhotoOracle& oracle, double threshold, const textprep::EmojiTable* emoji) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("similarity threshold must lie in (0, 1]");
  auto prep_bio = [&](const std::string& bio) {
    std::string s = textprep::replace_entities(bio);
    return emoji ? textprep::demojize(s, *emoji) : s;
  };
  SimilarityReport r;
  r.genuine_target = genuine.username;
  r.sim_username = text_cosine(candidate.username, genuine.username);
  r.sim_full_name = text_cosine(candidate.full_name, genuine.full_name);
  r.sim_biography = text_cosine(prep_bio(candidate.biography), prep_bio(genuine.biography));
  r.photo_similar = photo_similar(candidate, genuine, oracle);
  r.similar_feature_count = (r.sim_username >= threshold) + (r.sim_full_name >= threshold) +
                            (r.sim_biography >= threshold) + (r.photo_similar ? 1 : 0);
  r.is_impersonator = r.similar_feature_count >= 1;
  return r;
}

std::pair<int, int> msf_lsf(std::span<const SimilarityReport> reports) {
  if (reports.empty()) throw DataError("no similarity reports");
  int msf = 0;
  int lsf = 0;
  bool have_nonzero = false;
  for (const auto& r : reports) {
    msf = std::max(msf, r.similar_feature_count);
    if (r.similar_feature_count > 0) {
      lsf = have_nonzero ? std::min(lsf, r.similar_feature_count) : r.similar_feature_count;
      have_nonzero = true;
    }
  }
  return {msf, lsf};
}

CandidateAssessment assess_against_community(const ProfileRecord& candidate,
                                             std::span<const ProfileRecord> community,
                                             const PhotoOracle& oracle, double threshold,
                                             const textprep::EmojiTable* emoji) {
  std::vector<SimilarityReport> reports;
  reports.reserve(community.size());
  for (const auto& g : community) {
    if (g.username == candidate.username) continue;
    reports.push_back(assess_profile(candidate, g, oracle, threshold, emoji));
  }
  if (reports.empty()) throw DataError("genuine community is empty for candidate '" + candidate.username + "'");
  CandidateAssessment out;
  std::tie(out.msf, out.lsf) = msf_lsf(reports);
  const SimilarityReport* best = &reports.front();
  for (const auto& r : reports) {
    if (r.similar_feature_count > best->similar_feature_count ||
        (r.similar_feature_count == best->similar_feature_count && r.sim_username > best->sim_username))
      best = &r;
  }
  out.best = *best;
  return out;
}

}  // namespace impsense::similarity
