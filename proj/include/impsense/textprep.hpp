#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace impsense::textprep {

using TokenList = std::vector<std::string>;
using Stemmer = std::function<std::string(std::string_view)>;

/// Patterns used by replace_entities (ECMAScript syntax).
inline constexpr const char* kUrlPattern = R"((?:https?://|www\.)[^\s]+)";
inline constexpr const char* kEmailPattern = R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})";
/// At least nine digits, optionally led by '+', separated by space, '-', '.', or parentheses.
inline constexpr const char* kPhonePattern = R"(\+?\(?\d(?:[ \-.()]{0,2}\d){8,14})";

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(const std::vector<std::string>& words);
  static StopwordSet load(const std::filesystem::path& path);

  /// Entries are stored lowercased with apostrophes removed, matching normalize's output.
  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Frequency-ranked wordlist; rank is the 1-based line number.
class SegmentationDictionary {
 public:
  SegmentationDictionary() = default;
  /// Words are lowercased. Single-character entries other than "a", "i" and
  /// digits are dropped so that unknown spans are not shredded into letters.
  explicit SegmentationDictionary(const std::vector<std::string>& ranked_words);
  static SegmentationDictionary load(const std::filesystem::path& path);

  /// 1-based rank, 0 when absent. Case-insensitive.
  std::size_t rank(std::string_view word) const;
  /// log(rank * log(total)); only meaningful for known words.
  double word_cost(std::size_t rank) const;
  std::size_t total_words() const { return total_; }
  std::size_t max_word_length() const { return max_len_; }
  /// Cost charged per character of an unknown span.
  double unknown_char_cost() const { return unknown_cost_; }

 private:
  std::unordered_map<std::string, std::size_t> ranks_;
  std::size_t total_ = 0;
  std::size_t max_len_ = 0;
  double log_total_ = 0.0;
  double unknown_cost_ = 0.0;
};

class EmojiTable {
 public:
  EmojiTable() = default;
  /// `names`: "HEXCODEPOINT TAB name" lines; `emoticons`: "emoticon TAB word" lines.
  static EmojiTable load(const std::filesystem::path& names, const std::filesystem::path& emoticons);

  void add_emoji(char32_t cp, std::string name) { names_[cp] = std::move(name); }
  void add_emoticon(std::string emoticon, std::string word) { emoticons_[std::move(emoticon)] = std::move(word); }

  const std::string* emoji_name(char32_t cp) const;
  const std::string* emoticon_word(std::string_view token) const;

 private:
  std::unordered_map<char32_t, std::string> names_;
  std::unordered_map<std::string, std::string> emoticons_;
};

/// True for codepoints inside the pictographic blocks treated as emoji.
bool is_emoji_codepoint(char32_t cp);
/// Variation selectors, zero-width joiner, skin-tone modifiers and keycap combiner.
bool is_emoji_modifier(char32_t cp);
std::size_t count_emoji(std::string_view text);

/// URLs → "website", emails → "email", phone numbers → "phones", newlines → "line".
std::string replace_entities(std::string_view text);

/// Emoji → table name ("emoji" when unmapped), whole-token emoticons → mapped word.
std::string demojize(std::string_view text, const EmojiTable& table);

struct Tags {
  TokenList hashtags;
  TokenList mentions;
};

/// A marker starts a tag at string start or after a non-word character
/// (another marker included, so "##x" yields "x"). Tags are lowercased.
Tags extract_tags(std::string_view text);

/// Lowercase, punctuation to whitespace (apostrophes deleted), split, drop
/// stopwords and tokens under three codepoints, then stem to a fixed point and
/// filter again. An empty stemmer skips stemming.
TokenList normalize(std::string_view text, const StopwordSet& stopwords, const Stemmer& stemmer);

/// Minimum-cost split of `word` into dictionary words; runs of unknown
/// characters are merged into one piece. Returns {word} if nothing is known.
TokenList segment_compound(std::string_view word, const SegmentationDictionary& dict);

/// Splits on non-alphanumerics, then segments each run.
TokenList segment_identifier(std::string_view identifier, const SegmentationDictionary& dict);

/// Bundled resources loaded from one directory.
struct TextResources {
  StopwordSet stopwords;
  SegmentationDictionary dictionary;
  EmojiTable emoji;
  Stemmer stemmer;

  static TextResources load(const std::filesystem::path& data_dir);
  static std::filesystem::path default_data_dir();
};

/// Full caption pipeline: replace_entities → demojize → extract_tags → normalize.
struct PreparedText {
  TokenList tokens;
  Tags tags;
};
PreparedText prepare(std::string_view raw, const TextResources& res);

std::string join(const TokenList& tokens, std::string_view sep = " ");

}  // namespace impsense::textprep
