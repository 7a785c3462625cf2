#include <doctest.h>

#include "impsense/io.hpp"
#include "impsense/pipeline.hpp"
#include "support.hpp"

using namespace impsense;

TEST_SUITE("io") {

TEST_CASE("records round trip through JSON lines") {
  ProfileRecord p;
  p.username = "lady.gaga_fan";
  p.full_name = "Lady \"G\"";
  p.biography = "line1\nline2 \xF0\x9F\x94\xA5";
  p.follower_count = 12;
  p.photo_id = "ph1";
  p.is_private = true;
  const auto back = io::parse_profile(io::to_json_line(p));
  CHECK(io::to_json_line(back) == io::to_json_line(p));
  CHECK(back.photo_id == p.photo_id);

  PostRecord q;
  q.post_id = "x1";
  q.caption = "hi #a @b";
  q.hashtags = {"a"};
  q.mentions = {"b"};
  q.media_type = MediaType::video;
  q.publisher_id = "u";
  CHECK(io::to_json_line(io::parse_post(io::to_json_line(q))) == io::to_json_line(q));
}

TEST_CASE("malformed lines are data errors with line numbers") {
  testsupport::TempDir dir("io");
  PostRecord q;
  q.post_id = "ok";
  q.publisher_id = "u";
  const auto good = io::to_json_line(q);
  io::write_file_atomic(dir.path() / "p.jsonl", good + "\n\n" + good + "\n{\"post_id\": 5\n");
  try {
    io::read_posts(dir.path() / "p.jsonl");
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":4") != std::string::npos);
    CHECK(e.exit_code() == 3);
  }
  io::write_file_atomic(dir.path() / "neg.jsonl", "{\"username\": \"a\", \"follower_count\": -3}\n");
  CHECK_THROWS_AS(io::read_profiles(dir.path() / "neg.jsonl"), DataError);
  CHECK_THROWS_AS(io::read_posts(dir.path() / "missing.jsonl"), DataError);
}

TEST_CASE("atomic writes replace the whole file") {
  testsupport::TempDir dir("atomic");
  io::write_file_atomic(dir.path() / "f", "first version");
  io::write_file_atomic(dir.path() / "f", "second");
  CHECK(io::read_file(dir.path() / "f") == "second");
}

TEST_CASE("pipeline config") {
  const auto cfg = pipeline::PipelineConfig::parse(R"({"seed": 5, "train": {"epochs": 3}, "clustering": {"k_max": 6}})");
  CHECK(cfg.seed == 5);
  CHECK(cfg.train.epochs == 3);
  CHECK(cfg.k_max == 6);
  const auto again = pipeline::PipelineConfig::parse(cfg.to_json());
  CHECK(again.to_json() == cfg.to_json());
  CHECK_THROWS_AS(pipeline::PipelineConfig::parse(R"({"sed": 5})"), ConfigError);
  CHECK_THROWS_AS(pipeline::PipelineConfig::parse(R"({"train": {"epochs": "x"}})"), ConfigError);
  CHECK_THROWS_AS(pipeline::PipelineConfig::parse("{"), ConfigError);
  CHECK_THROWS_AS(pipeline::PipelineConfig::parse(R"({"similarity": {"threshold": 0}})").validate(), ConfigError);
}

}
