#include "impsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "impsense/io.hpp"

namespace impsense::synth {
namespace {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------- pools

constexpr std::array<std::string_view, 40> kFirstNames{
    "adrian", "bella",  "carlos", "diana",  "elena", "felix", "gina",   "hugo",  "iris",   "jonas",
    "kara",   "leon",   "maya",   "nico",   "olga",  "pablo", "quinn",  "rosa",  "stefan", "tara",
    "ulla",   "vera",   "wesley", "xenia",  "yara",  "zane",  "amelia", "bruno", "celine", "dario",
    "esme",   "fabian", "greta",  "henrik", "ines",  "jasper", "lucia", "marco", "nadia",  "oscar"};
constexpr std::array<std::string_view, 40> kLastNames{
    "moreno",  "fischer", "novak",  "silva",  "larsen",  "rossi",   "duval",    "keller", "santos",  "berg",
    "costa",   "marin",   "petrov", "lind",   "hart",    "okafor",  "tanaka",   "weber",  "alvarez", "brandt",
    "castillo", "dubois", "ferro",  "holm",   "ivanova", "jensen",  "kowalski", "lopez",  "mancini", "nilsen",
    "ortega",  "pereira", "quist",  "romero", "strand",  "torres",  "umber",    "varga",  "wolff",   "zeller"};
constexpr std::array<std::string_view, 10> kRoles{"Singer", "Actor", "Footballer", "Tennis player", "President",
                                                  "Author", "Chef", "Film director", "Drummer", "Designer"};
constexpr std::array<std::string_view, 8> kTaglines{
    "New album out now", "Official account", "World champion", "Tour dates below",
    "Management inquiries by email", "Proud parent", "Living the dream", "Thank you for the support"};

constexpr std::array<std::string_view, 24> kHandleFillers{
    "fan",     "fans",    "club",  "daily", "news",  "official", "real", "the",   "team", "world", "love", "page",
    "army",    "nation",  "forever", "updates", "hq", "tv",      "lover", "media", "insta", "best", "only", "just"};
constexpr std::array<std::string_view, 12> kNameFillers{"Fan", "Club", "Page", "Daily", "News", "Updates",
                                                        "Army", "Lover", "World", "Official", "Fans", "Team"};
constexpr std::array<std::string_view, 12> kBioFillers{
    "fan page",        "daily updates",     "not affiliated", "follow for more", "dm for promo", "news and photos",
    "biggest fan",     "since 2015",        "love you forever", "parody account", "best moments",
    "turn on notifications"};

// Caption phrases: each group of four words is emitted in a class-specific
// order. The three orders share no adjacent word pair.
constexpr std::array<std::string_view, 48> kPhraseWords{
    "result", "target", "core",    "whole", "garden", "road",  "coach", "mail",  "anthem", "cartoon", "fact",  "program",
    "school", "flight", "palm",    "jump",  "alpha",  "gulf",  "coat",  "ground", "mode",  "model",   "actor", "brown",
    "date",   "port",   "room",    "equal", "impact", "sleep", "driver", "meet",  "heat",   "train",   "audio", "gain",
    "mask",   "file",   "urban",   "golf",  "chain",  "zero",  "font",  "tube",  "flower", "print",   "return", "chapter"};
constexpr std::array<std::array<int, 4>, kNumClasses> kPhraseOrder{{{0, 1, 2, 3}, {3, 2, 1, 0}, {2, 0, 3, 1}}};
constexpr std::array<std::string_view, 40> kFillerWords{
    "father", "concert", "unit",  "steam",  "side",  "hotel",   "stream", "tour",  "colour", "code",
    "dream",  "event",   "cotton", "saint", "powder", "hero",   "flow",   "iron",  "union",  "birth",
    "address", "phrase", "cost",  "logic",  "wish",  "short",   "guard",  "singer", "reward", "airport",
    "quick",  "wide",    "sweet", "corner", "phone", "review",  "sign",   "form",  "boat",   "salt"};
constexpr std::array<std::string_view, 20> kHashtagWords{"daily", "photo", "life",  "style",  "music",
                                                         "world", "news",  "trend", "summer", "follow",
                                                         "night", "team",  "love",  "fashion", "travel",
                                                         "food",  "nature", "sport", "city",  "beach"};
constexpr std::array<std::string_view, 5> kBotEmoji{"\U0001F525", "\U0001F4AF", "\U0001F449", "\U0001F4B0",
                                                    "✅"};
constexpr std::array<std::string_view, 5> kFanEmoji{"❤", "\U0001F60D", "\U0001F525", "✨", "\U0001F64C"};
constexpr std::array<std::string_view, 4> kGenuineEmoji{"\U0001F64F", "✨", "\U0001F3B6", "⚽"};
constexpr std::array<std::string_view, 12> kSharedEmoji{"\U0001F525", "\U0001F4AF", "\U0001F449", "\U0001F4B0", "✅", "❤",
                                                       "\U0001F60D", "✨",         "\U0001F64C", "\U0001F64F", "\U0001F3B6", "⚽"};

// ---------------------------------------------------------------- sampling

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
bool chance(Rng& rng, double p) { return p > 0 && std::bernoulli_distribution(std::min(p, 1.0))(rng); }

template <typename Container>
const auto& pick(Rng& rng, const Container& c) {
  return c[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(std::size(c)) - 1))];
}

// Log-normal with the requested mean.
double lognormal_mean(Rng& rng, double mean, double sigma) {
  return std::lognormal_distribution<double>(std::log(mean) - sigma * sigma / 2, sigma)(rng);
}

double beta_mean(Rng& rng, double mean, double concentration) {
  const double a = std::gamma_distribution<double>(mean * concentration, 1.0)(rng);
  const double b = std::gamma_distribution<double>((1 - mean) * concentration, 1.0)(rng);
  return a + b > 0 ? a / (a + b) : mean;
}

std::int64_t gamma_poisson(Rng& rng, double mean, double shape) {
  if (mean <= 0) return 0;
  const double lambda = std::gamma_distribution<double>(shape, mean / shape)(rng);
  return std::poisson_distribution<std::int64_t>(lambda)(rng);
}

std::int64_t count_from(double x) { return std::max<std::int64_t>(0, std::llround(x)); }

std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_words(const std::vector<std::string>& words, std::string_view sep = " ") {
  std::string out;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!out.empty()) out += sep;
    out += w;
  }
  return out;
}

// ---------------------------------------------------------------- text fields

// Draws n candidates and keeps the one whose score is closest to `desired`
// on the same side of the threshold. Falls back to the most extreme candidate.
struct Chosen {
  std::string text;
  double score = 0;
};

Chosen choose_closest(Rng& rng, const std::function<std::string(Rng&)>& make,
                      const std::function<double(const std::string&)>& score, double desired, double threshold,
                      const std::function<bool(const std::string&)>& usable, int n = 48) {
  const bool high = desired >= threshold;
  Chosen best, fallback;
  double best_gap = std::numeric_limits<double>::infinity();
  bool have_fallback = false;
  for (int i = 0; i < n; ++i) {
    std::string c = make(rng);
    if (!usable(c)) continue;
    const double s = score(c);
    if ((s >= threshold) == high) {
      const double gap = std::abs(s - desired);
      if (gap < best_gap) {
        best_gap = gap;
        best = {c, s};
      }
    }
    if (!have_fallback || (high ? s > fallback.score : s < fallback.score)) {
      fallback = {c, s};
      have_fallback = true;
    }
  }
  return std::isfinite(best_gap) ? best : fallback;
}

std::string strip_separators(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '.' && c != '_') out += c;
  return out;
}

std::string handle_candidate(Rng& rng, const std::string& target_username) {
  const std::string core = strip_separators(target_username);
  const int keep = uniform_int(rng, 0, static_cast<int>(core.size()));
  const int start = uniform_int(rng, 0, static_cast<int>(core.size()) - keep);
  std::vector<std::string> parts;
  if (keep > 0) parts.push_back(core.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(keep)));
  const int fillers = uniform_int(rng, keep < 3 ? 1 : 0, 2);
  for (int f = 0; f < fillers; ++f) {
    std::string w(pick(rng, kHandleFillers));
    if (chance(rng, 0.5))
      parts.insert(parts.begin(), std::move(w));
    else
      parts.push_back(std::move(w));
  }
  static constexpr std::array<std::string_view, 4> seps{"", "_", ".", "__"};
  std::string out = join_words(parts, pick(rng, seps));
  if (chance(rng, 0.3)) out += std::to_string(uniform_int(rng, 10, 99));
  return out;
}

std::string full_name_candidate(Rng& rng, const std::string& target_full_name) {
  const auto words = split_words(target_full_name);
  std::vector<std::string> parts;
  for (const auto& w : words) {
    if (!chance(rng, 0.55)) continue;
    const int keep = uniform_int(rng, 2, static_cast<int>(w.size()));
    parts.push_back(w.substr(0, static_cast<std::size_t>(keep)));
  }
  const int extra = uniform_int(rng, parts.empty() ? 1 : 0, 2);
  for (int e = 0; e < extra; ++e) {
    std::string w = chance(rng, 0.6) ? std::string(pick(rng, kNameFillers))
                                     : capitalize(chance(rng, 0.5) ? pick(rng, kFirstNames) : pick(rng, kLastNames));
    if (chance(rng, 0.5))
      parts.insert(parts.begin(), std::move(w));
    else
      parts.push_back(std::move(w));
  }
  return join_words(parts);
}

std::string bio_candidate(Rng& rng, const std::string& target_bio, PostClass label) {
  const auto words = split_words(target_bio);
  std::vector<std::string> parts;
  const int keep = uniform_int(rng, 0, static_cast<int>(words.size()));
  const int start = uniform_int(rng, 0, static_cast<int>(words.size()) - keep);
  for (int i = start; i < start + keep; ++i) parts.push_back(words[static_cast<std::size_t>(i)]);
  const int fillers = uniform_int(rng, 0, 2);
  for (int f = 0; f < fillers; ++f) parts.emplace_back(pick(rng, kBioFillers));
  if (label == PostClass::fan && chance(rng, 0.5)) parts.emplace_back(pick(rng, kFanEmoji));
  if (label == PostClass::bot && chance(rng, 0.4))
    parts.push_back("#" + std::string(pick(rng, kHashtagWords)) + std::string(pick(rng, kHashtagWords)));
  return join_words(parts);
}

ProfileRecord make_genuine(Rng& rng, const GeneratorConfig& cfg, std::set<std::string>& taken) {
  ProfileRecord p;
  std::string first, last;
  static constexpr std::array<std::string_view, 3> seps{"", ".", "_"};
  do {
    first = std::string(pick(rng, kFirstNames));
    last = std::string(pick(rng, kLastNames));
    p.username = first + std::string(pick(rng, seps)) + last;
  } while (taken.count(strip_separators(p.username)) > 0);
  taken.insert(strip_separators(p.username));
  taken.insert(p.username);
  p.full_name = capitalize(first) + " " + capitalize(last);
  p.biography = std::string(pick(rng, kRoles)) + " | " + std::string(pick(rng, kTaglines));
  if (chance(rng, 0.3)) p.biography += " " + std::string(pick(rng, kGenuineEmoji));
  const double lo = std::log(cfg.genuine_follower_min), hi = std::log(cfg.genuine_follower_max);
  p.follower_count = count_from(std::exp(uniform(rng, lo, hi)));
  p.followee_count = uniform_int(rng, 0, 800);
  p.media_count = uniform_int(rng, 300, 8000);
  p.is_verified = true;
  p.has_external_url = chance(rng, cfg.genuine.external_url_prob);
  p.account_age_days = count_from(lognormal_mean(rng, cfg.genuine.account_age_mean, cfg.genuine.account_age_sigma));
  p.photo_id = "ph_" + p.username;
  return p;
}

struct SimDraw {
  double username = 0, full_name = 0, biography = 0;
  bool photo = false;
};

SimDraw draw_similarity(Rng& rng, const SimilarityParams& sp, double threshold) {
  SimDraw d;
  if (sp.anchored) {
    std::discrete_distribution<int> anchor(sp.anchor_weights.begin(), sp.anchor_weights.end());
    const int a = anchor(rng);
    auto low = [&] { return std::min(beta_mean(rng, sp.low_mean, sp.concentration), threshold - 0.02); };
    d.username = a == 0 ? uniform(rng, sp.anchor_low, sp.anchor_high) : low();
    d.full_name = a == 1 ? uniform(rng, sp.anchor_low, sp.anchor_high) : low();
    d.biography = a == 2 ? uniform(rng, sp.anchor_low, sp.anchor_high) : low();
    d.photo = a == 3 || chance(rng, sp.photo_rate);
    return d;
  }
  d.username = beta_mean(rng, sp.username, sp.concentration);
  d.full_name = beta_mean(rng, sp.full_name, sp.concentration);
  d.biography = beta_mean(rng, sp.biography, sp.concentration);
  d.photo = chance(rng, sp.photo_rate);
  if (!d.photo && d.username < threshold && d.full_name < threshold && d.biography < threshold)
    d.username = uniform(rng, threshold, std::min(1.0, threshold + 0.3));
  return d;
}

GeneratedProfile make_impersonator(Rng& rng, PostClass label, std::size_t target_index, const ProfileRecord& target,
                                   const GeneratorConfig& cfg, const textprep::TextResources& res,
                                   std::set<std::string>& taken) {
  const ClassParams& cp = label == PostClass::fan ? cfg.fan : cfg.bot;
  const SimilarityParams& sp = label == PostClass::fan ? cfg.fan_sim : cfg.bot_sim;
  const SimDraw want = draw_similarity(rng, sp, cfg.threshold);

  GeneratedProfile g;
  g.label = label;
  g.target = target_index;
  ProfileRecord& p = g.profile;
  const auto any = [](const std::string&) { return true; };

  p.username = choose_closest(
                   rng, [&](Rng& r) { return handle_candidate(r, target.username); },
                   [&](const std::string& c) { return similarity::text_cosine(c, target.username); }, want.username,
                   cfg.threshold, [&](const std::string& c) { return !c.empty() && taken.count(c) == 0; })
                   .text;
  if (p.username.empty() || taken.count(p.username)) {
    // every candidate collided; fall back to a numbered handle
    p.username = strip_separators(target.username) + "_" + std::to_string(taken.size());
  }
  taken.insert(p.username);

  p.full_name = choose_closest(
                    rng, [&](Rng& r) { return full_name_candidate(r, target.full_name); },
                    [&](const std::string& c) { return similarity::text_cosine(c, target.full_name); },
                    want.full_name, cfg.threshold, any)
                    .text;

  auto prep_bio = [&](const std::string& bio) {
    return textprep::demojize(textprep::replace_entities(bio), res.emoji);
  };
  const std::string target_bio = prep_bio(target.biography);
  p.biography = choose_closest(
                    rng, [&](Rng& r) { return bio_candidate(r, target.biography, label); },
                    [&](const std::string& c) { return similarity::text_cosine(prep_bio(c), target_bio); },
                    want.biography, cfg.threshold, any)
                    .text;

  p.follower_count = count_from(lognormal_mean(rng, cp.follower_mean, cp.follower_sigma));
  p.followee_count = count_from(lognormal_mean(rng, cp.followee_mean, cp.followee_sigma));
  p.media_count = count_from(lognormal_mean(rng, cp.media_mean, cp.media_sigma));
  p.account_age_days = count_from(lognormal_mean(rng, cp.account_age_mean, cp.account_age_sigma));
  p.has_external_url = chance(rng, cp.external_url_prob);
  p.is_private = false;
  p.is_verified = false;
  if (want.photo) {
    p.photo_id = "ph_" + target.username + "_copy_" + p.username;
  } else if (chance(rng, 0.9)) {
    p.photo_id = "ph_" + p.username;
  }
  return g;
}

// ---------------------------------------------------------------- posts

std::string hashtag_compound(Rng& rng) {
  return std::string(pick(rng, kHashtagWords)) + std::string(pick(rng, kHashtagWords));
}

std::vector<std::string> name_parts(const ProfileRecord& p) {
  std::vector<std::string> out;
  for (const auto& w : split_words(p.full_name)) out.push_back(lower(w));
  return out;
}

}  // namespace

GeneratorConfig GeneratorConfig::defaults(Separability s) {
  GeneratorConfig c;
  c.separability = s;

  c.genuine.account_age_mean = 3000;
  c.genuine.account_age_sigma = 0.2;
  c.genuine.external_url_prob = 0.9;
  c.genuine.duplicate_prob = 0.0;
  c.genuine.hashtag_rate = 1.0;
  c.genuine.emoji_rate = 0.5;
  c.genuine.url_prob = 0.1;
  c.genuine.mention_prob = 0.2;
  c.genuine.tag_prob = 0.2;
  c.genuine.video_prob = 0.4;
  c.genuine.name_cue_prob = 0.15;
  c.genuine.min_phrases = 3;
  c.genuine.max_phrases = 4;
  c.genuine.post_share = 0.30;

  // Table V: fans 101.6K followers, 757 followees, 808 media, 24.15 comments
  // and 1.6K likes per post; bots 16.5K, 927, 679, 10.01, 774.
  c.fan.follower_mean = 101.6e3;
  c.fan.followee_mean = 757;
  c.fan.media_mean = 808;
  c.fan.comment_mean = 24.15;
  c.fan.like_mean = 1600;
  c.fan.account_age_mean = 1100;
  c.fan.external_url_prob = 0.2;
  c.fan.duplicate_prob = 0.03;
  c.fan.hashtag_rate = 2.0;
  c.fan.emoji_rate = 1.5;
  c.fan.url_prob = 0.05;
  c.fan.mention_prob = 0.4;
  c.fan.tag_prob = 0.3;
  c.fan.video_prob = 0.3;
  c.fan.name_cue_prob = 0.5;
  c.fan.min_phrases = 2;
  c.fan.max_phrases = 4;
  c.fan.post_share = 0.38;

  c.bot.follower_mean = 16.5e3;
  c.bot.followee_mean = 927;
  c.bot.media_mean = 679;
  c.bot.comment_mean = 10.01;
  c.bot.like_mean = 774;
  c.bot.account_age_mean = 400;
  c.bot.account_age_sigma = 0.5;
  c.bot.external_url_prob = 0.6;
  c.bot.duplicate_prob = 0.3;
  c.bot.hashtag_rate = 4.0;
  c.bot.emoji_rate = 1.0;
  c.bot.url_prob = 0.35;
  c.bot.mention_prob = 0.3;
  c.bot.tag_prob = 0.1;
  c.bot.video_prob = 0.1;
  c.bot.name_cue_prob = 0.1;
  c.bot.min_phrases = 2;
  c.bot.max_phrases = 3;
  c.bot.post_share = 0.32;

  // Table V: fans 0.49 / 0.40 / 0.25 username / full name / bio similarity and
  // 0.71 photo; bots 0.13 / 0.18 / 0.18 and 0.17.
  c.fan_sim = {0.49, 0.40, 0.25, 0.71, 8, false, {}, 0.30, 0.50, 0.06};
  c.bot_sim = {0.13, 0.18, 0.18, 0.06, 5, true, {0.20, 0.33, 0.35, 0.12}, 0.30, 0.50, 0.06};

  // Hard: weaker class cues in captions and hashtags. Profile traits are left
  // alone so clustering still sees two groups.
  if (s == Separability::hard) {
    c.order_strength = 0.35;
    c.cue_strength = 0.25;
    c.bot.duplicate_prob = 0.15;
    c.bot.hashtag_rate = 3.0;
  }
  return c;
}

void GeneratorConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("generator config: " + what);
  };
  need(n_genuine >= 1, "n_genuine must be >= 1");
  need(n_fan >= 0 && n_bot >= 0 && n_posts >= 0, "counts must be >= 0");
  need(genuine_follower_min > 0 && genuine_follower_max >= genuine_follower_min, "invalid genuine follower range");
  need(order_strength >= 0 && order_strength <= 1, "order_strength must lie in [0, 1]");
  need(cue_strength >= 0 && cue_strength <= 1, "cue_strength must lie in [0, 1]");
  need(time_end > time_begin, "time range is empty");
  need(threshold > 0 && threshold <= 1, "threshold must lie in (0, 1]");
  for (const ClassParams* cp : {&fan, &bot}) {
    need(cp->follower_mean > 0 && cp->followee_mean > 0 && cp->media_mean > 0 && cp->account_age_mean > 0,
         "profile means must be positive");
    need(cp->like_mean >= 0 && cp->comment_mean >= 0, "engagement means must be >= 0");
  }
  for (const ClassParams* cp : {&genuine, &fan, &bot}) {
    need(cp->engagement_shape > 0, "engagement shape must be positive");
    for (double p : {cp->external_url_prob, cp->duplicate_prob, cp->url_prob, cp->mention_prob, cp->tag_prob,
                     cp->video_prob, cp->name_cue_prob, cp->post_share})
      need(p >= 0 && p <= 1, "probabilities must lie in [0, 1]");
    need(cp->hashtag_rate >= 0 && cp->emoji_rate >= 0, "rates must be >= 0");
    need(cp->min_phrases >= 1 && cp->max_phrases >= cp->min_phrases, "invalid phrase range");
  }
  need(genuine.account_age_mean > 0, "genuine account age mean must be positive");
  for (const SimilarityParams* sp : {&fan_sim, &bot_sim}) {
    for (double m : {sp->username, sp->full_name, sp->biography, sp->low_mean})
      need(m > 0 && m < 1, "similarity means must lie in (0, 1)");
    need(sp->photo_rate >= 0 && sp->photo_rate <= 1, "photo rate must lie in [0, 1]");
    need(sp->concentration > 0, "concentration must be positive");
  }
}

Population gen_profiles(const GeneratorConfig& cfg, const textprep::TextResources& res) {
  cfg.validate();
  if (static_cast<std::size_t>(cfg.n_genuine) > kFirstNames.size() * kLastNames.size())
    throw ConfigError("generator config: too many genuine accounts for the name pools");
  Population pop;
  std::set<std::string> taken;
  Rng grng(derive_seed(cfg.seed, 1));
  for (int i = 0; i < cfg.n_genuine; ++i) pop.genuine.push_back(make_genuine(grng, cfg, taken));

  // fans first, then bots; each profile has its own stream
  const int total = cfg.n_fan + cfg.n_bot;
  for (int i = 0; i < total; ++i) {
    Rng rng(derive_seed(cfg.seed, 100000 + static_cast<std::uint64_t>(i)));
    const PostClass label = i < cfg.n_fan ? PostClass::fan : PostClass::bot;
    const auto target = static_cast<std::size_t>(uniform_int(rng, 0, cfg.n_genuine - 1));
    pop.impersonators.push_back(make_impersonator(rng, label, target, pop.genuine[target], cfg, res, taken));
  }

  for (const auto& g : pop.impersonators) {
    if (!g.profile.photo_id) continue;
    for (std::size_t t = 0; t < pop.genuine.size(); ++t) {
      const bool match = t == g.target && g.profile.photo_id->find("_copy_") != std::string::npos;
      pop.oracle.set(*g.profile.photo_id, *pop.genuine[t].photo_id, match);
    }
  }
  for (std::size_t a = 0; a < pop.genuine.size(); ++a)
    for (std::size_t b = a + 1; b < pop.genuine.size(); ++b)
      pop.oracle.set(*pop.genuine[a].photo_id, *pop.genuine[b].photo_id, false);
  return pop;
}

std::vector<PostRecord> gen_posts(const ProfileRecord& publisher, PostClass label, int n, const GeneratorConfig& cfg,
                                  const PostContext& ctx, std::uint64_t seed) {
  if (n < 0) throw ConfigError("post count must be >= 0");
  const ClassParams& cp = label == PostClass::genuine ? cfg.genuine : label == PostClass::fan ? cfg.fan : cfg.bot;
  Rng rng(seed);
  const int cls = class_index(label);
  const ProfileRecord& named = ctx.target ? *ctx.target : publisher;
  const auto names = name_parts(named);
  const std::string named_last = names.empty() ? "star" : names.back();

  // profile-level engagement level (gamma with mean 1) and bot hashtag network
  const double level = std::gamma_distribution<double>(4.0, 0.25)(rng);
  double like_mean = cp.like_mean, comment_mean = cp.comment_mean;
  if (label == PostClass::genuine) {
    like_mean = static_cast<double>(publisher.follower_count) * uniform(rng, 0.004, 0.02);
    comment_mean = like_mean * uniform(rng, 0.01, 0.03);
  }
  std::vector<std::string> network;
  {
    Rng net(fnv1a(named.username));
    for (int i = 0; i < 6; ++i) network.push_back(hashtag_compound(net));
  }

  std::vector<PostRecord> out;
  for (int k = 0; k < n; ++k) {
    PostRecord p;
    p.post_id = "p_" + publisher.username + "_" + std::to_string(k);
    p.publisher_id = publisher.username;

    if (!out.empty() && chance(rng, cp.duplicate_prob)) {
      const PostRecord& prev = out[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(out.size()) - 1))];
      p.caption = prev.caption;
      p.hashtags = prev.hashtags;
      p.mentions = prev.mentions;
      p.emoji_count = prev.emoji_count;
      p.has_url = prev.has_url;
    } else {
      std::vector<std::string> words;
      const int phrases = uniform_int(rng, cp.min_phrases, cp.max_phrases);
      for (int ph = 0; ph < phrases; ++ph) {
        const int group = uniform_int(rng, 0, static_cast<int>(kPhraseWords.size() / 4) - 1);
        std::array<int, 4> order = kPhraseOrder[static_cast<std::size_t>(cls)];
        if (!chance(rng, cfg.order_strength)) std::shuffle(order.begin(), order.end(), rng);
        for (int o : order) words.emplace_back(kPhraseWords[static_cast<std::size_t>(group * 4 + o)]);
        const int fill = uniform_int(rng, 0, 2);
        for (int f = 0; f < fill; ++f) words.emplace_back(pick(rng, kFillerWords));
      }
      if (chance(rng, cp.name_cue_prob) && !names.empty()) {
        const auto at = static_cast<std::ptrdiff_t>(uniform_int(rng, 0, static_cast<int>(words.size())));
        words.insert(words.begin() + at, pick(rng, names));
      }
      if (!words.empty()) words[0] = capitalize(words[0]);
      p.caption = join_words(words);

      const auto n_tags = std::poisson_distribution<int>(cp.hashtag_rate)(rng);
      for (int h = 0; h < n_tags; ++h) {
        std::string tag;
        if (label == PostClass::bot && chance(rng, cfg.cue_strength)) {
          tag = pick(rng, network);
        } else if (label == PostClass::fan && chance(rng, cfg.cue_strength * 5.0 / 7.0)) {
          static constexpr std::array<std::string_view, 4> forms{"team", "", "fans", "nation"};
          const std::string_view f = pick(rng, forms);
          tag = f == "team" ? "team" + named_last : f.empty() ? strip_separators(named.username) : named_last + std::string(f);
        } else {
          tag = hashtag_compound(rng);
        }
        p.hashtags.push_back(tag);
        p.caption += " #" + tag;
      }
      if (chance(rng, cp.mention_prob)) {
        std::string who;
        if (label == PostClass::fan && ctx.target && chance(rng, cfg.cue_strength))
          who = ctx.target->username;
        else if (!ctx.peers.empty())
          who = pick(rng, ctx.peers);
        if (!who.empty() && who != publisher.username) {
          p.mentions.push_back(lower(who));
          p.caption += " @" + who;
        }
      }
      const auto n_emoji = std::poisson_distribution<int>(cp.emoji_rate)(rng);
      for (int e = 0; e < n_emoji; ++e) {
        p.caption += " ";
        if (!chance(rng, cfg.cue_strength))
          p.caption += pick(rng, kSharedEmoji);
        else
          p.caption += label == PostClass::bot   ? pick(rng, kBotEmoji)
                       : label == PostClass::fan ? pick(rng, kFanEmoji)
                                                 : pick(rng, kGenuineEmoji);
      }
      p.emoji_count = n_emoji;
      if (chance(rng, cp.url_prob)) {
        static constexpr std::string_view alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
        std::string slug;
        for (int i = 0; i < 6; ++i) slug += alnum[static_cast<std::size_t>(uniform_int(rng, 0, 35))];
        p.caption += " https://bit.ly/" + slug;
        p.has_url = true;
      }
    }

    if (chance(rng, cp.tag_prob)) {
      if (ctx.target && ctx.target != &publisher)
        p.tagged_users.push_back(ctx.target->username);
      else if (!ctx.peers.empty())
        p.tagged_users.push_back(pick(rng, ctx.peers));
    }
    p.like_count = gamma_poisson(rng, like_mean * level, cp.engagement_shape);
    p.comment_count = gamma_poisson(rng, comment_mean * level, cp.engagement_shape);
    p.media_type = chance(rng, cp.video_prob) ? MediaType::video : MediaType::image;
    p.timestamp = std::uniform_int_distribution<std::int64_t>(cfg.time_begin, cfg.time_end - 1)(rng);
    out.push_back(std::move(p));
  }
  return out;
}

Dataset gen_dataset(const GeneratorConfig& cfg, const textprep::TextResources& res) {
  Dataset ds;
  ds.population = gen_profiles(cfg, res);
  const Population& pop = ds.population;

  std::array<std::vector<std::size_t>, kNumClasses> members;  // impersonator index, or genuine index for class 2
  for (std::size_t i = 0; i < pop.impersonators.size(); ++i)
    members[static_cast<std::size_t>(class_index(pop.impersonators[i].label))].push_back(i);
  for (std::size_t i = 0; i < pop.genuine.size(); ++i) members[2].push_back(i);

  // split n_posts by class share (largest remainder), skipping empty classes
  std::array<double, kNumClasses> share{cfg.bot.post_share, cfg.fan.post_share, cfg.genuine.post_share};
  for (int c = 0; c < kNumClasses; ++c)
    if (members[static_cast<std::size_t>(c)].empty()) share[static_cast<std::size_t>(c)] = 0;
  const double share_total = std::accumulate(share.begin(), share.end(), 0.0);
  if (share_total <= 0 && cfg.n_posts > 0) throw ConfigError("generator config: no class can publish posts");
  std::array<int, kNumClasses> per_class{};
  std::array<double, kNumClasses> rem{};
  int assigned = 0;
  for (std::size_t c = 0; c < share.size(); ++c) {
    const double exact = share_total > 0 ? cfg.n_posts * share[c] / share_total : 0;
    per_class[c] = static_cast<int>(std::floor(exact));
    rem[c] = exact - per_class[c];
    assigned += per_class[c];
  }
  while (assigned < cfg.n_posts) {
    const auto c = static_cast<std::size_t>(std::max_element(rem.begin(), rem.end()) - rem.begin());
    ++per_class[c];
    rem[c] = -1;
    ++assigned;
  }

  Rng alloc(derive_seed(cfg.seed, 2));
  std::array<std::vector<int>, kNumClasses> counts;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto m = members[c].size();
    counts[c].assign(m, 0);
    if (m == 0) continue;
    int left = per_class[c];
    if (static_cast<std::size_t>(left) >= m) {
      std::fill(counts[c].begin(), counts[c].end(), 1);
      left -= static_cast<int>(m);
      std::vector<double> activity(m);
      for (auto& a : activity) a = std::gamma_distribution<double>(2.0, 1.0)(alloc);
      std::discrete_distribution<std::size_t> who(activity.begin(), activity.end());
      for (int k = 0; k < left; ++k) ++counts[c][who(alloc)];
    } else {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), alloc);
      for (int k = 0; k < left; ++k) counts[c][order[static_cast<std::size_t>(k)]] = 1;
    }
  }

  std::vector<std::string> genuine_names, fan_names, bot_names;
  for (const auto& g : pop.genuine) genuine_names.push_back(g.username);
  for (const auto& g : pop.impersonators) (g.label == PostClass::fan ? fan_names : bot_names).push_back(g.profile.username);

  auto emit = [&](std::vector<PostRecord> posts, PostClass label) {
    for (auto& p : posts) {
      ds.posts.push_back(std::move(p));
      ds.post_labels.push_back(label);
    }
  };
  for (std::size_t i = 0; i < pop.genuine.size(); ++i) {
    const PostContext ctx{&pop.genuine[i], genuine_names};
    emit(gen_posts(pop.genuine[i], PostClass::genuine, counts[2][i], cfg, ctx,
                   derive_seed(cfg.seed, 500000 + i)),
         PostClass::genuine);
  }
  std::array<std::size_t, kNumClasses> seen{};
  for (std::size_t i = 0; i < pop.impersonators.size(); ++i) {
    const auto& g = pop.impersonators[i];
    const auto c = static_cast<std::size_t>(class_index(g.label));
    const PostContext ctx{&pop.genuine[g.target], g.label == PostClass::fan ? fan_names : bot_names};
    emit(gen_posts(g.profile, g.label, counts[c][seen[c]++], cfg, ctx, derive_seed(cfg.seed, 600000 + i)), g.label);
  }
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  std::vector<ProfileRecord> candidates;
  for (const auto& g : ds.population.impersonators) candidates.push_back(g.profile);
  io::write_profiles(dir / kGenuineFile, ds.population.genuine);
  io::write_profiles(dir / kProfilesFile, candidates);
  io::write_posts(dir / kPostsFile, ds.posts);
  ds.population.oracle.save(dir / kPhotoOracleFile);

  std::string labels = "record,id,label\n";
  for (const auto& g : ds.population.genuine) labels += "profile," + g.username + ",genuine\n";
  for (const auto& g : ds.population.impersonators)
    labels += "profile," + g.profile.username + "," + std::string(to_string(g.label)) + "\n";
  for (std::size_t i = 0; i < ds.posts.size(); ++i)
    labels += "post," + ds.posts[i].post_id + "," + std::string(to_string(ds.post_labels[i])) + "\n";
  io::write_file_atomic(dir / kLabelsFile, labels);
}

GroundTruth read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  GroundTruth gt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    const auto a = line.find(',');
    const auto b = line.rfind(',');
    if (a == std::string::npos || a == b) throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad row");
    const std::string kind = line.substr(0, a);
    auto entry = std::make_pair(line.substr(a + 1, b - a - 1), parse_post_class(line.substr(b + 1)));
    if (kind == "profile")
      gt.profiles.push_back(std::move(entry));
    else if (kind == "post")
      gt.posts.push_back(std::move(entry));
    else
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": unknown record kind '" + kind + "'");
  }
  return gt;
}

}  // namespace impsense::synth
