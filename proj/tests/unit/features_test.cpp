#include <doctest.h>

#include <cstring>
#include <random>

#include "impsense/features.hpp"
#include "impsense/lda.hpp"
#include "support.hpp"

using namespace impsense;
using namespace impsense::features;

TEST_SUITE("features") {

TEST_CASE("vocabulary fit") {
  const std::vector<std::string> corpus{"b b a", "a c a"};
  const auto v = Vocabulary::fit(corpus);
  CHECK(v.id("a") == 1);
  CHECK(v.id("b") == 2);
  CHECK(v.id("c") == 3);
  const auto capped = Vocabulary::fit(corpus, 2);
  CHECK(capped.size() == 2);
  CHECK(capped.id("c") == capped.oov_id());
  CHECK(Vocabulary::fit(std::vector<std::string>{"x"}).id("x") == 1);
  CHECK_THROWS_AS(Vocabulary::fit(std::vector<std::string>{}), DataError);
}

TEST_CASE("vocabulary indices are a bijection onto 1..V") {
  const std::vector<std::string> corpus{"q w e r t y", "q w e", "z x q"};
  const auto v = Vocabulary::fit(corpus, 5);
  for (int i = 1; i <= static_cast<int>(v.size()); ++i) CHECK(v.id(v.token(i)) == i);
  CHECK(v.size() == 5);
}

TEST_CASE("encode pads at the front and truncates at the tail") {
  const auto v = Vocabulary::fit(std::vector<std::string>{"a a b"});
  CHECK(encode("a b", v, 4) == std::vector<int>{0, 0, 1, 2});
  const auto five = Vocabulary::fit(std::vector<std::string>{"a b c d e"});
  CHECK(encode("a b c d e", five, 3) == std::vector<int>{five.id("a"), five.id("b"), five.id("c")});
  CHECK(encode("zzz", v, 2) == std::vector<int>{0, v.oov_id()});
  CHECK(encode("", v, 3) == std::vector<int>{0, 0, 0});
}

TEST_CASE("encode then decode returns in-vocabulary tokens") {
  const auto v = Vocabulary::fit(std::vector<std::string>{"red green blue red"});
  CHECK(decode(encode("red unknown blue", v, 6), v) == TokenList{"red", "blue"});
}

TEST_CASE("sentiment") {
  SentimentLexicon lex;
  lex.set("great", 0.8);
  lex.set("awful", -0.8);
  CHECK(sentiment(std::vector<std::string>{"great"}, lex) == doctest::Approx(0.8));
  CHECK(sentiment(std::vector<std::string>{}, lex) == 0.0);
  CHECK(sentiment(std::vector<std::string>{"great", "awful"}, lex) == doctest::Approx(0.0));
  const auto bundled = SentimentLexicon::load(std::string(IMPSENSE_TEST_DATA_DIR) + "/sentiment_lexicon.tsv");
  REQUIRE(bundled.valence("great"));
  std::mt19937_64 rng(1);
  std::vector<std::string> words{"great", "awful", "love", "hate", "fine", "xyz"};
  for (int t = 0; t < 200; ++t) {
    std::vector<std::string> toks;
    for (int i = 0; i < 6; ++i) toks.push_back(words[rng() % words.size()]);
    const double s = sentiment(toks, bundled);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("ratio") {
  CHECK(ratio(446, 256) == doctest::Approx(1.7422).epsilon(1e-4));
  CHECK(ratio(0, 0) == 0.0);
  CHECK(ratio(5, 0) == 5.0);
}

TEST_CASE("metadata vector round trips bit-exactly") {
  MetadataVector v{};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (auto& x : v) x = u(rng);
  v[0] = 0.1;
  v[1] = 1.0 / 3.0;
  const auto back = parse_metadata(serialize_metadata(v));
  CHECK(std::memcmp(back.data(), v.data(), sizeof(double) * kMetadataDim) == 0);
}

TEST_CASE("build_metadata") {
  PostRecord post;
  post.post_id = "p";
  post.caption = "great day @bob #fun";
  post.like_count = 12;
  post.comment_count = 3;
  post.tagged_users = {"x", "y"};
  post.media_type = MediaType::video;
  post.timestamp = 1609459200 - 2 * 86400;
  ProfileRecord profile;
  profile.username = "u";
  profile.follower_count = 256;
  profile.followee_count = 446;
  profile.media_count = 0;
  similarity::SimilarityReport report;
  report.sim_username = 0.4;
  report.photo_similar = true;
  SentimentLexicon lex;
  const auto m = build_metadata({post, profile, report}, testsupport::resources(), lex, 1609459200);
  CHECK(m[kLikeCount] == 12);
  CHECK(m[kTaggedUsersCount] == 2);
  CHECK(m[kMentionUsersCount] == 1);
  CHECK(m[kHashtagCount] == 1);
  CHECK(m[kMediaType] == 1);
  CHECK(m[kDateAgeDays] == doctest::Approx(2.0));
  CHECK(m[kSimUsername] == 0.4);
  CHECK(m[kSimPhoto] == 1.0);
  CHECK(m[kFollowingFollowersRatio] == doctest::Approx(446.0 / 256.0));
  CHECK(m[kFollowersPostsRatio] == 256.0);
}

TEST_CASE("corpus fusion order") {
  CorpusParts p;
  CHECK(fuse_corpus_entry(p) == "");
  p.caption = {"go", "team"};
  p.hashtags = {"team", "a"};
  p.biography = {"bio"};
  p.identity = {"lady", "gaga"};
  p.topic_words = {"music"};
  CHECK(fuse_corpus_entry(p) == "go team team a bio lady gaga music");
  CHECK(fuse_post_entry(p) == "go team team a music");
  CorpusParts q = p;
  std::swap(q.caption, q.hashtags);
  CHECK(fuse_corpus_entry(q) != fuse_corpus_entry(p));
}

TEST_CASE("metadata scaler uses training statistics") {
  MatrixXd raw = MatrixXd::Random(20, static_cast<Eigen::Index>(kMetadataDim)).cwiseAbs() * 10;
  const auto s = MetadataScaler::fit(raw);
  const MatrixXd z = s.transform(raw);
  CHECK(z.allFinite());
  for (Eigen::Index j = 0; j < z.cols(); ++j) CHECK(std::abs(z.col(j).mean()) < 1e-9);
}

TEST_CASE("lda separates disjoint vocabularies") {
  std::vector<TokenList> corpus;
  std::mt19937_64 rng(2);
  const TokenList a{"engine", "wheel", "brake", "gear", "piston", "clutch"};
  const TokenList b{"river", "fish", "boat", "shore", "water", "reed"};
  for (int d = 0; d < 40; ++d) {
    const auto& src = d % 2 ? b : a;
    TokenList doc;
    for (int i = 0; i < 12; ++i) doc.push_back(src[rng() % src.size()]);
    corpus.push_back(doc);
  }
  const auto m = lda_fit(corpus, {2, -1.0, 0.01, 200}, 9);
  for (int t = 0; t < 2; ++t) {
    const auto top = m.top_words(t, 5);
    const bool in_a = std::find(a.begin(), a.end(), top[0]) != a.end();
    int pure = 0;
    for (const auto& w : top) pure += (std::find(a.begin(), a.end(), w) != a.end()) == in_a;
    CHECK(pure >= 5);
  }
  for (std::size_t d = 0; d < m.documents(); ++d) CHECK(m.document_distribution(d).sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.total_assigned() == 40 * 12);
  CHECK(m.counts_consistent());
  for (int t = 0; t < 2; ++t) CHECK(m.topic_word_distribution(t).sum() == doctest::Approx(1.0));

  const auto again = lda_fit(corpus, {2, -1.0, 0.01, 200}, 9);
  for (std::size_t d = 0; d < m.documents(); ++d) CHECK(again.assignments(d) == m.assignments(d));

  const auto one = lda_fit(corpus, {1, -1.0, 0.01, 20}, 9);
  for (std::size_t d = 0; d < one.documents(); ++d) {
    for (int z : one.assignments(d)) CHECK(z == 0);
    CHECK(one.document_distribution(d)(0) == doctest::Approx(1.0));
  }

  const auto back = TopicModel::deserialize(m.serialize());
  CHECK(back.top_words(0, 5) == m.top_words(0, 5));
  CHECK(back.dominant_topic(a, 50, 1) == m.dominant_topic(a, 50, 1));
  CHECK_THROWS_AS(lda_fit({{"x"}}, {2, -1.0, 0.01, 10}, 0), DataError);
}

}
