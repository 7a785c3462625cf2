#include <doctest.h>

#include <random>
#include <vector>

#include "../oracles.hpp"
#include "impsense/similarity.hpp"
#include "support.hpp"

using namespace impsense;
using namespace impsense::similarity;

namespace {

ProfileRecord profile(std::string user, std::string name = "", std::string bio = "",
                      std::optional<std::string> photo = std::nullopt) {
  ProfileRecord p;
  p.username = std::move(user);
  p.full_name = std::move(name);
  p.biography = std::move(bio);
  p.photo_id = std::move(photo);
  return p;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("text_cosine examples") {
  CHECK(text_cosine("barackobama", "barackobama") == doctest::Approx(1.0));
  CHECK(text_cosine("abcd", "wxyz") == 0.0);
  CHECK(text_cosine("abcd", "bcde") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(text_cosine("a", "abc") == 0.0);
  CHECK(text_cosine("Barack_Obama", "barack.obama") == doctest::Approx(1.0));
}

TEST_CASE("text_cosine matches the set oracle on random strings") {
  std::mt19937_64 rng(5);
  const std::string alpha = "abcAB_. x";
  std::uniform_int_distribution<std::size_t> len(0, 9), ch(0, alpha.size() - 1);
  for (int t = 0; t < 2000; ++t) {
    std::string a, b;
    for (std::size_t i = len(rng); i > 0; --i) a += alpha[ch(rng)];
    for (std::size_t i = len(rng); i > 0; --i) b += alpha[ch(rng)];
    const double c = text_cosine(a, b);
    CHECK(c == doctest::Approx(oracles::bigram_cosine(a, b)).epsilon(1e-12));
    CHECK(c == doctest::Approx(text_cosine(b, a)).epsilon(1e-15));
    CHECK(c >= 0.0);
    CHECK(c <= 1.0 + 1e-12);
  }
}

TEST_CASE("photo oracle") {
  PhotoTableOracle oracle;
  oracle.set("A", "A", true);
  oracle.set("A", "B", true);
  const auto a = profile("x", "", "", "A"), b = profile("y", "", "", "B"), none = profile("z");
  CHECK(photo_similar(a, a, oracle));
  CHECK(photo_similar(a, b, oracle));
  CHECK(photo_similar(b, a, oracle));
  CHECK_FALSE(photo_similar(none, a, oracle));
  const auto misses = oracle.misses();
  CHECK_FALSE(photo_similar(b, profile("w", "", "", "C"), oracle));
  CHECK(oracle.misses() == misses + 1);
}

TEST_CASE("photo oracle file round trip") {
  testsupport::TempDir dir("oracle");
  PhotoTableOracle oracle;
  oracle.set("A", "B", true);
  oracle.set("A", "C", false);
  oracle.save(dir.path() / "o.tsv");
  const auto back = PhotoTableOracle::load(dir.path() / "o.tsv");
  CHECK(back.size() == 2);
  CHECK(back.lookup("B", "A") == std::optional<bool>(true));
  CHECK(back.lookup("A", "C") == std::optional<bool>(false));
  CHECK_FALSE(back.lookup("B", "C").has_value());
}

TEST_CASE("assess_profile threshold rule") {
  PhotoTableOracle oracle;
  oracle.set("p1", "p2", true);
  SUBCASE("nothing similar") {
    const auto r = assess_profile(profile("abcd"), profile("wxyz"), oracle);
    CHECK_FALSE(r.is_impersonator);
    CHECK(r.similar_feature_count == 0);
  }
  SUBCASE("one username metric suffices") {
    const auto r = assess_profile(profile("abcdef"), profile("abcxyz"), oracle);
    CHECK(r.sim_username == doctest::Approx(0.4));
    CHECK(r.is_impersonator);
    CHECK(r.similar_feature_count == 1);
  }
  SUBCASE("photo alone suffices") {
    const auto r = assess_profile(profile("abcd", "", "", "p1"), profile("wxyz", "", "", "p2"), oracle);
    CHECK(r.photo_similar);
    CHECK(r.is_impersonator);
    CHECK(r.similar_feature_count == 1);
  }
}

TEST_CASE("assess_profile property over random inputs") {
  std::mt19937_64 rng(11);
  const std::string alpha = "abcdefgh";
  std::uniform_int_distribution<std::size_t> len(2, 8), ch(0, alpha.size() - 1);
  auto word = [&] {
    std::string s;
    for (std::size_t i = len(rng); i > 0; --i) s += alpha[ch(rng)];
    return s;
  };
  PhotoTableOracle oracle;
  std::bernoulli_distribution coin(0.2);
  for (int t = 0; t < 1000; ++t) {
    const bool photo = coin(rng);
    if (photo) oracle.set("c" + std::to_string(t), "g" + std::to_string(t), true);
    const auto c = profile(word(), word(), word(), "c" + std::to_string(t));
    const auto g = profile(word(), word(), word(), "g" + std::to_string(t));
    const auto r = assess_profile(c, g, oracle);
    const bool text = oracles::bigram_cosine(c.username, g.username) >= 0.3 ||
                      oracles::bigram_cosine(c.full_name, g.full_name) >= 0.3 ||
                      oracles::bigram_cosine(c.biography, g.biography) >= 0.3;
    CHECK(r.is_impersonator == (text || photo));
  }
}

TEST_CASE("msf_lsf") {
  auto reports = [](std::vector<int> counts) {
    std::vector<SimilarityReport> out;
    for (int c : counts) {
      SimilarityReport r;
      r.similar_feature_count = c;
      out.push_back(r);
    }
    return out;
  };
  CHECK(msf_lsf(reports({3})) == std::pair{3, 3});
  CHECK(msf_lsf(reports({1, 3, 2})) == std::pair{3, 1});
  CHECK(msf_lsf(reports({0, 0})) == std::pair{0, 0});
  CHECK_THROWS_AS(msf_lsf(reports({})), DataError);
}

TEST_CASE("community assessment picks the best target and skips itself") {
  PhotoTableOracle oracle;
  const std::vector<ProfileRecord> community{profile("barackobama", "Barack Obama"), profile("ladygaga", "Lady Gaga")};
  const auto a = assess_against_community(profile("barack.obama.fan", "Barack Obama"), community, oracle);
  CHECK(a.best.genuine_target == "barackobama");
  CHECK(a.best.is_impersonator);
  CHECK(a.msf == 2);
  const auto self = assess_against_community(community[0], community, oracle);
  CHECK(self.best.genuine_target == "ladygaga");
}

}
