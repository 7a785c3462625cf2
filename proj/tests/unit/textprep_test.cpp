#include <doctest.h>

#include <fstream>
#include <sstream>

#include "impsense/porter.hpp"
#include "impsense/textprep.hpp"
#include "support.hpp"

using namespace impsense::textprep;
using testsupport::resources;

TEST_SUITE("textprep") {

TEST_CASE("replace_entities") {
  CHECK(replace_entities("see https://a.b/x now") == "see website now");
  CHECK(replace_entities("") == "");
  CHECK(replace_entities("call +1-202-555-0147\nbye") == "call phones line bye");
  CHECK(replace_entities("mail me at a.b@ex.com") == "mail me at email");
  CHECK(replace_entities("room 42 ok") == "room 42 ok");
}

TEST_CASE("demojize") {
  const auto& emoji = resources().emoji;
  CHECK(demojize("great \xF0\x9F\x94\xA5", emoji) == "great fire");
  CHECK(demojize("plain text", emoji) == "plain text");
  CHECK(demojize(":)", emoji) == "smile");
  EmojiTable empty;
  CHECK(demojize("\xF0\x9F\x94\xA5", empty) == "emoji");
}

TEST_CASE("normalize") {
  const auto& r = resources();
  CHECK(normalize("The CATS are Running!!", r.stopwords, r.stemmer) == TokenList{"cat", "run"});
  CHECK(normalize("", r.stopwords, r.stemmer).empty());
  CHECK(normalize("go is ok", r.stopwords, r.stemmer).empty());
}

TEST_CASE("normalize is pure") {
  const auto& r = resources();
  const std::string s = "Running dogs chase the quick foxes";
  CHECK(normalize(s, r.stopwords, r.stemmer) == normalize(s, r.stopwords, r.stemmer));
}

TEST_CASE("segment_compound") {
  const auto& d = resources().dictionary;
  CHECK(segment_compound("makeamericagreatagain", d) == TokenList{"make", "america", "great", "again"});
  CHECK(segment_compound("obama", d) == TokenList{"obama"});
  CHECK(segment_compound("ladygaga", d) == TokenList{"lady", "gaga"});
  const std::size_t lady = d.rank("lady"), gaga = d.rank("gaga");
  REQUIRE(lady > 0);
  REQUIRE(gaga > 0);
  CHECK(d.word_cost(lady) + d.word_cost(gaga) < 8 * d.unknown_char_cost());
}

TEST_CASE("extract_tags") {
  auto t = extract_tags("go #TeamA with @bob");
  CHECK(t.hashtags == TokenList{"teama"});
  CHECK(t.mentions == TokenList{"bob"});
  t = extract_tags("##x");
  CHECK(t.hashtags == TokenList{"x"});
  CHECK(t.mentions.empty());
  t = extract_tags("");
  CHECK(t.hashtags.empty());
  CHECK(t.mentions.empty());
  CHECK(extract_tags("mail a@b.com").mentions.empty());
}

TEST_CASE("porter stemmer reference pairs") {
  std::ifstream in(IMPSENSE_TEST_FIXTURE_DIR "/porter_pairs.tsv");
  REQUIRE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string word, stem;
    ss >> word >> stem;
    if (word.empty()) continue;
    CHECK_MESSAGE(porter_stem(word) == stem, word);
    ++n;
  }
  CHECK(n > 300);
}

TEST_CASE("prepare composes the stages") {
  const auto p = prepare("Loving it #MakeAmericaGreatAgain https://x.y/z", resources());
  CHECK(p.tags.hashtags == TokenList{"makeamericagreatagain"});
  for (const auto& tok : p.tokens) CHECK(tok.find("http") == std::string::npos);
}

}
