#include <doctest.h>

#include <fstream>
#include <set>

#include "impsense/io.hpp"
#include "impsense/pipeline.hpp"
#include "impsense/synth.hpp"
#include "support.hpp"

using namespace impsense;
using namespace impsense::synth;
using testsupport::resources;

namespace {

double duplicate_rate(const std::vector<PostRecord>& posts) {
  std::set<std::string> seen;
  int dup = 0;
  for (const auto& p : posts) dup += !seen.insert(p.caption).second;
  return static_cast<double>(dup) / static_cast<double>(posts.size());
}

std::vector<PostRecord> class_posts(PostClass label, int n, std::uint64_t seed) {
  auto cfg = GeneratorConfig::defaults();
  cfg.seed = seed;
  const auto pop = gen_profiles(cfg, resources());
  std::vector<std::string> peers;
  for (const auto& g : pop.genuine) peers.push_back(g.username);
  for (const auto& imp : pop.impersonators)
    if (imp.label == label) return gen_posts(imp.profile, label, n, cfg, {&pop.genuine[imp.target], peers}, seed);
  return {};
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("generators are deterministic") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n_posts = 200;
  cfg.seed = 4;
  const auto a = gen_dataset(cfg, resources());
  const auto b = gen_dataset(cfg, resources());
  REQUIRE(a.posts.size() == b.posts.size());
  for (std::size_t i = 0; i < a.posts.size(); ++i) CHECK(io::to_json_line(a.posts[i]) == io::to_json_line(b.posts[i]));
  REQUIRE(a.population.impersonators.size() == b.population.impersonators.size());
  for (std::size_t i = 0; i < a.population.impersonators.size(); ++i)
    CHECK(io::to_json_line(a.population.impersonators[i].profile) ==
          io::to_json_line(b.population.impersonators[i].profile));
}

TEST_CASE("generated records validate and counts add up") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n_genuine = 100;
  cfg.n_fan = 100;
  cfg.n_bot = 100;
  cfg.n_posts = 600;
  cfg.seed = 1;
  const auto ds = gen_dataset(cfg, resources());
  CHECK(ds.population.genuine.size() + ds.population.impersonators.size() == 300);
  CHECK(ds.posts.size() == 600);
  for (const auto& g : ds.population.genuine) CHECK_NOTHROW(g.validate());
  for (const auto& i : ds.population.impersonators) CHECK_NOTHROW(i.profile.validate());
  for (const auto& p : ds.posts) CHECK_NOTHROW(p.validate());

  testsupport::TempDir dir("synth");
  write_dataset(dir.path(), ds);
  const auto truth = read_labels(dir.path() / kLabelsFile);
  std::set<PostClass> classes;
  for (const auto& [id, c] : truth.posts) classes.insert(c);
  CHECK(classes.size() == 3);
  CHECK(truth.posts.size() == 600);
}

TEST_CASE("post generator edge and rate checks") {
  CHECK(class_posts(PostClass::bot, 0, 1).empty());
  const auto bots = class_posts(PostClass::bot, 500, 2);
  const auto fans = class_posts(PostClass::fan, 500, 2);
  CHECK(duplicate_rate(bots) > duplicate_rate(fans));

  auto cfg = GeneratorConfig::defaults();
  cfg.n_bot = 1000;
  cfg.seed = 3;
  const auto pop = gen_profiles(cfg, resources());
  std::vector<std::string> peers;
  double comments = 0;
  int n = 0;
  for (std::size_t i = 0; i < pop.impersonators.size(); ++i) {
    const auto& imp = pop.impersonators[i];
    if (imp.label != PostClass::bot) continue;
    for (const auto& p : gen_posts(imp.profile, imp.label, 1, cfg, {&pop.genuine[imp.target], peers}, derive_seed(5, i))) {
      comments += static_cast<double>(p.comment_count);
      ++n;
    }
  }
  CHECK(n == 1000);
  CHECK(std::abs(comments / n - 10.01) <= 0.15 * 10.01);
}

TEST_CASE("population means track their targets") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n_fan = 1000;
  cfg.n_bot = 1000;
  cfg.seed = 6;
  const auto pop = gen_profiles(cfg, resources());
  double fan_followers = 0, bot_username = 0;
  for (const auto& imp : pop.impersonators) {
    if (imp.label == PostClass::fan) fan_followers += static_cast<double>(imp.profile.follower_count);
    else bot_username += similarity::text_cosine(imp.profile.username, pop.genuine[imp.target].username);
  }
  CHECK(std::abs(fan_followers / 1000 - 101.6e3) <= 0.2 * 101.6e3);
  CHECK(std::abs(bot_username / 1000 - 0.13) <= 0.05);
}

TEST_CASE("invalid generator settings are config errors") {
  auto cfg = GeneratorConfig::defaults();
  cfg.cue_strength = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = GeneratorConfig::defaults();
  cfg.n_posts = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("hard data still clusters into two groups") {
  pipeline::PipelineConfig cfg;
  cfg.generator = GeneratorConfig::defaults(Separability::hard);
  cfg.generator.seed = 21;
  cfg.generator.n_posts = 1500;
  const auto ds = gen_dataset(cfg.generator, resources());
  pipeline::Inputs in;
  in.genuine = ds.population.genuine;
  for (const auto& g : ds.population.impersonators) in.candidates.push_back(g.profile);
  in.posts = ds.posts;
  in.oracle = ds.population.oracle;
  const auto id = pipeline::identify(in, cfg, resources());
  const auto cl = pipeline::cluster(in, id, cfg);
  CHECK(cl.elbow.k_star == 2);
}

}
