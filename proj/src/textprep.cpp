#include "impsense/textprep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <regex>

#include "impsense/common.hpp"
#include "impsense/porter.hpp"
#include "utf8.hpp"

namespace impsense::textprep {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Tag characters: ASCII alphanumerics, underscore, and any non-ASCII byte.
bool is_word_byte(char c) { return is_ascii_alnum(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }

// Non-ASCII codepoints that normalize treats as punctuation.
bool is_unicode_punct(char32_t cp) {
  return (cp >= 0x00A0 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 || (cp >= 0x2000 && cp <= 0x206F) ||
         (cp >= 0x2190 && cp <= 0x23FF) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE4F) ||
         (cp >= 0xFF00 && cp <= 0xFF0F) || cp == 0xFFFD || is_emoji_codepoint(cp) || is_emoji_modifier(cp);
}

std::string stem_to_fixpoint(const Stemmer& stemmer, std::string token) {
  for (int iter = 0; iter < 16; ++iter) {
    std::string next = stemmer(token);
    if (next == token) break;
    token = std::move(next);
  }
  return token;
}

}  // namespace

// ---------------------------------------------------------------- resources

StopwordSet::StopwordSet(const std::vector<std::string>& words) {
  for (const auto& w : words) {
    std::string key;
    for (char c : lower_ascii(w))
      if (c != '\'') key += c;
    if (!key.empty()) words_.insert(key);
  }
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) { return StopwordSet(read_lines(path)); }

bool StopwordSet::contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }

SegmentationDictionary::SegmentationDictionary(const std::vector<std::string>& ranked_words) {
  total_ = 0;
  for (const auto& raw : ranked_words) {
    if (raw.empty()) continue;
    ++total_;
    const std::string w = lower_ascii(raw);
    const bool single = w.size() == 1;
    if (single && w != "a" && w != "i" && !(w[0] >= '0' && w[0] <= '9')) continue;
    if (ranks_.emplace(w, total_).second) max_len_ = std::max(max_len_, w.size());
  }
  log_total_ = std::log(static_cast<double>(std::max<std::size_t>(total_, 3)));
  unknown_cost_ = word_cost(std::max<std::size_t>(total_, 1)) + 1.0;
}

SegmentationDictionary SegmentationDictionary::load(const std::filesystem::path& path) {
  return SegmentationDictionary(read_lines(path));
}

std::size_t SegmentationDictionary::rank(std::string_view word) const {
  auto it = ranks_.find(lower_ascii(word));
  return it == ranks_.end() ? 0 : it->second;
}

double SegmentationDictionary::word_cost(std::size_t rank) const {
  return std::log(static_cast<double>(rank) * log_total_);
}

EmojiTable EmojiTable::load(const std::filesystem::path& names, const std::filesystem::path& emoticons) {
  EmojiTable t;
  for (const auto& line : read_lines(names)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const auto cp = static_cast<char32_t>(std::stoul(line.substr(0, tab), nullptr, 16));
    t.add_emoji(cp, line.substr(tab + 1));
  }
  for (const auto& line : read_lines(emoticons)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    t.add_emoticon(line.substr(0, tab), line.substr(tab + 1));
  }
  return t;
}

const std::string* EmojiTable::emoji_name(char32_t cp) const {
  auto it = names_.find(cp);
  return it == names_.end() ? nullptr : &it->second;
}

const std::string* EmojiTable::emoticon_word(std::string_view token) const {
  auto it = emoticons_.find(std::string(token));
  return it == emoticons_.end() ? nullptr : &it->second;
}

bool is_emoji_codepoint(char32_t cp) {
  if (is_emoji_modifier(cp)) return false;
  return (cp >= 0x2600 && cp <= 0x27BF) || (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0x1F000 && cp <= 0x1FAFF);
}

bool is_emoji_modifier(char32_t cp) {
  return cp == 0xFE0E || cp == 0xFE0F || cp == 0x200D || cp == 0x20E3 || (cp >= 0x1F3FB && cp <= 0x1F3FF) ||
         (cp >= 0xE0020 && cp <= 0xE007F);
}

std::size_t count_emoji(std::string_view text) {
  std::size_t n = 0;
  bool pending_flag = false;
  for (char32_t cp : utf8::decode(text)) {
    if (is_regional_indicator(cp)) {
      if (!pending_flag) ++n;
      pending_flag = !pending_flag;
      continue;
    }
    pending_flag = false;
    if (is_emoji_codepoint(cp)) ++n;
  }
  return n;
}

// ---------------------------------------------------------------- operations

std::string replace_entities(std::string_view text) {
  static const std::regex url(kUrlPattern);
  static const std::regex email(kEmailPattern);
  static const std::regex phone(kPhonePattern);
  std::string s(text);
  s = std::regex_replace(s, url, "website");
  s = std::regex_replace(s, email, "email");
  s = std::regex_replace(s, phone, "phones");

  std::string out;
  out.reserve(s.size() + 8);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool crlf = s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n';
    if (s[i] != '\n' && !crlf) {
      out += s[i];
      continue;
    }
    if (crlf) ++i;
    if (!out.empty() && !is_space(out.back())) out += ' ';
    out += "line";
    if (i + 1 < s.size() && !is_space(s[i + 1])) out += ' ';
  }
  return out;
}

std::string demojize(std::string_view text, const EmojiTable& table) {
  // Whole-token emoticons first; whitespace is preserved verbatim.
  std::string stage;
  stage.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (is_space(text[i])) {
      stage += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    const std::string_view tok = text.substr(i, j - i);
    if (const std::string* w = table.emoticon_word(tok))
      stage += *w;
    else
      stage += tok;
    i = j;
  }

  std::string out;
  out.reserve(stage.size() + 16);
  bool pad_next = false;
  auto emit_word = [&](const std::string& w) {
    if (!out.empty() && !is_space(out.back())) out += ' ';
    out += w;
    pad_next = true;
  };
  static const std::string kFallback = "emoji";
  static const std::string kFlag = "flag";
  bool in_flag = false;
  for (std::size_t i = 0; i < stage.size();) {
    const utf8::Decoded d = utf8::decode_at(stage, i);
    i += d.len;
    if (is_emoji_modifier(d.cp)) continue;
    if (is_regional_indicator(d.cp)) {
      if (!in_flag) emit_word(kFlag);
      in_flag = !in_flag;
      continue;
    }
    in_flag = false;
    if (is_emoji_codepoint(d.cp)) {
      const std::string* name = table.emoji_name(d.cp);
      emit_word(name ? *name : kFallback);
      continue;
    }
    if (pad_next && d.cp != ' ' && d.cp != '\t' && d.cp != '\n' && d.cp != '\r') out += ' ';
    pad_next = false;
    utf8::append(out, d.cp);
  }
  return out;
}

Tags extract_tags(std::string_view text) {
  Tags tags;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '#' && c != '@') continue;
    if (i > 0 && is_word_byte(text[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_word_byte(text[j])) ++j;
    if (j == i + 1) continue;
    std::string tag = lower_ascii(text.substr(i + 1, j - i - 1));
    (c == '#' ? tags.hashtags : tags.mentions).push_back(std::move(tag));
    i = j - 1;
  }
  return tags;
}

TokenList normalize(std::string_view text, const StopwordSet& stopwords, const Stemmer& stemmer) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const utf8::Decoded d = utf8::decode_at(text, i);
    i += d.len;
    const char32_t cp = d.cp;
    if (cp == '\'' || cp == 0x2019) continue;
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      cleaned += is_ascii_alnum(c) ? ascii_lower(c) : ' ';
    } else if (is_unicode_punct(cp)) {
      cleaned += ' ';
    } else {
      utf8::append(cleaned, cp);
    }
  }

  auto keep = [&](const std::string& tok) { return utf8::length(tok) >= 3 && !stopwords.contains(tok); };

  TokenList out;
  for (std::size_t i = 0; i < cleaned.size();) {
    if (cleaned[i] == ' ') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cleaned.size() && cleaned[j] != ' ') ++j;
    std::string tok = cleaned.substr(i, j - i);
    i = j;
    if (!keep(tok)) continue;
    if (stemmer) {
      tok = stem_to_fixpoint(stemmer, std::move(tok));
      if (!keep(tok)) continue;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

TokenList segment_compound(std::string_view word, const SegmentationDictionary& dict) {
  const std::size_t n = word.size();
  if (n == 0) return {};
  const std::string w = lower_ascii(word);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n + 1, kInf);
  std::vector<std::size_t> from(n + 1, 0);
  std::vector<bool> known(n + 1, false);
  cost[0] = 0.0;
  const std::size_t max_len = std::max<std::size_t>(dict.max_word_length(), 1);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > max_len ? i - max_len : 0;
    for (std::size_t j = lo; j < i; ++j) {
      const std::size_t r = dict.rank(std::string_view(w).substr(j, i - j));
      if (r == 0) continue;
      const double c = cost[j] + dict.word_cost(r);
      if (c < cost[i]) {
        cost[i] = c;
        from[i] = j;
        known[i] = true;
      }
    }
    const double c = cost[i - 1] + dict.unknown_char_cost();
    if (c < cost[i]) {
      cost[i] = c;
      from[i] = i - 1;
      known[i] = false;
    }
  }

  struct Piece {
    std::size_t begin, end;
    bool known;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = n; i > 0; i = from[i]) pieces.push_back({from[i], i, known[i]});
  std::reverse(pieces.begin(), pieces.end());

  TokenList out;
  bool any_known = false;
  bool prev_unknown = false;
  for (const Piece& p : pieces) {
    std::string text = w.substr(p.begin, p.end - p.begin);
    if (!p.known && prev_unknown) {
      out.back() += text;
    } else {
      out.push_back(std::move(text));
    }
    prev_unknown = !p.known;
    any_known = any_known || p.known;
  }
  if (!any_known) return {w};
  return out;
}

TokenList segment_identifier(std::string_view identifier, const SegmentationDictionary& dict) {
  TokenList out;
  for (std::size_t i = 0; i < identifier.size();) {
    if (!is_ascii_alnum(identifier[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < identifier.size() && is_ascii_alnum(identifier[j])) ++j;
    for (auto& piece : segment_compound(identifier.substr(i, j - i), dict)) out.push_back(std::move(piece));
    i = j;
  }
  return out;
}

std::filesystem::path TextResources::default_data_dir() {
  if (const char* env = std::getenv("IMPSENSE_DATA_DIR"); env && *env) return env;
  return IMPSENSE_DATA_DIR;
}

TextResources TextResources::load(const std::filesystem::path& data_dir) {
  TextResources r;
  r.stopwords = StopwordSet::load(data_dir / "stopwords_en.txt");
  r.dictionary = SegmentationDictionary::load(data_dir / "wordlist.txt");
  r.emoji = EmojiTable::load(data_dir / "emoji_names.tsv", data_dir / "emoticons.tsv");
  r.stemmer = [](std::string_view w) { return porter_stem(w); };
  return r;
}

PreparedText prepare(std::string_view raw, const TextResources& res) {
  const std::string text = demojize(replace_entities(raw), res.emoji);
  PreparedText p;
  p.tags = extract_tags(text);
  p.tokens = normalize(text, res.stopwords, res.stemmer);
  return p;
}

std::string join(const TokenList& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace impsense::textprep
