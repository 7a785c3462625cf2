#include "impsense/porter.hpp"

#include <array>
#include <utility>

namespace impsense::textprep {
namespace {

bool is_consonant(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// Number of VC sequences in [C](VC)^m[V].
int measure(const std::string& w) {
  int m = 0;
  std::size_t i = 0;
  const std::size_t n = w.size();
  while (i < n && is_consonant(w, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(w, i)) ++i;
    if (i >= n) break;
    while (i < n && is_consonant(w, i)) ++i;
    ++m;
  }
  return m;
}

bool contains_vowel(const std::string& w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!is_consonant(w, i)) return true;
  return false;
}

bool ends_double_consonant(const std::string& w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: stem ends cvc, where the second c is not w, x or y.
bool ends_cvc(const std::string& w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() && std::string_view(w).substr(w.size() - suffix.size()) == suffix;
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// First rule whose suffix matches decides: applied if the stem measure exceeds
// `min_measure`, otherwise the word is left alone.
template <std::size_t N>
std::string apply_measure_rules(std::string w, const std::array<Rule, N>& rules, int min_measure) {
  for (const Rule& r : rules) {
    if (!ends_with(w, r.suffix)) continue;
    std::string stem = w.substr(0, w.size() - r.suffix.size());
    if (measure(stem) > min_measure) return stem + std::string(r.replacement);
    return w;
  }
  return w;
}

std::string step1a(std::string w) {
  if (ends_with(w, "sses")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "ies")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "ss")) return w;
  if (ends_with(w, "s")) return w.substr(0, w.size() - 1);
  return w;
}

std::string step1b(std::string w) {
  if (ends_with(w, "eed")) {
    std::string stem = w.substr(0, w.size() - 3);
    return measure(stem) > 0 ? stem + "ee" : w;
  }
  std::string stem;
  bool stripped = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (ends_with(w, suffix)) {
      stem = w.substr(0, w.size() - suffix.size());
      if (contains_vowel(stem)) {
        stripped = true;
        break;
      }
    }
  }
  if (!stripped) return w;
  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  if (ends_double_consonant(stem)) {
    const char last = stem.back();
    if (last != 'l' && last != 's' && last != 'z') stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

std::string step1c(std::string w) {
  if (ends_with(w, "y") && contains_vowel(w.substr(0, w.size() - 1))) w.back() = 'i';
  return w;
}

std::string step2(std::string w) {
  static constexpr std::array<Rule, 20> rules{{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},    {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
  }};
  return apply_measure_rules(std::move(w), rules, 0);
}

std::string step3(std::string w) {
  static constexpr std::array<Rule, 7> rules{{
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  }};
  return apply_measure_rules(std::move(w), rules, 0);
}

std::string step4(std::string w) {
  static constexpr std::array<std::string_view, 19> suffixes{
      "al",  "ance", "ence", "er", "ic",  "able", "ible", "ant", "ement", "ment",
      "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
  for (std::string_view s : suffixes) {
    if (!ends_with(w, s)) continue;
    std::string stem = w.substr(0, w.size() - s.size());
    bool ok = measure(stem) > 1;
    if (s == "ion") ok = ok && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
    return ok ? stem : w;
  }
  return w;
}

std::string step5a(std::string w) {
  if (!ends_with(w, "e")) return w;
  std::string stem = w.substr(0, w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) return stem;
  return w;
}

std::string step5b(std::string w) {
  if (ends_with(w, "ll") && measure(w.substr(0, w.size() - 1)) > 1) w.pop_back();
  return w;
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  for (char c : w)
    if (c < 'a' || c > 'z') return w;
  if (w.empty()) return w;
  w = step1a(std::move(w));
  w = step1b(std::move(w));
  w = step1c(std::move(w));
  w = step2(std::move(w));
  w = step3(std::move(w));
  w = step4(std::move(w));
  w = step5a(std::move(w));
  w = step5b(std::move(w));
  return w;
}

}  // namespace impsense::textprep
