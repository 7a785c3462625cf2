#include <doctest.h>

#include <random>

#include "impsense/model_io.hpp"
#include "impsense/nn.hpp"

using namespace impsense;
using namespace impsense::nn;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.vocab_size = 10;
  c.seq_len = 8;
  c.embed_dim = 4;
  c.conv_filters = 3;
  c.conv_kernel = 3;
  c.lstm_units = 4;
  c.text_dense = 4;
  c.meta_dense = 4;
  c.head_dense = 5;
  c.metadata_dim = 3;
  return c;
}

// Three classes; class c uses tokens {3c+1, 3c+2, 3c+3} and a metadata bump on axis c.
std::vector<Example> separable(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, 3), len(3, 8);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<Example> out;
  for (int i = 0; i < n; ++i) {
    Example e;
    e.label = i % 3;
    const int l = len(rng);
    e.tokens.assign(8, 0);
    for (int t = 8 - l; t < 8; ++t) e.tokens[static_cast<std::size_t>(t)] = 3 * e.label + pick(rng);
    e.metadata = VectorXd(3);
    for (int j = 0; j < 3; ++j) e.metadata(j) = (j == e.label ? 1.0 : 0.0) + noise(rng);
    out.push_back(std::move(e));
  }
  return out;
}

double accuracy(const ModelParams& p, const ModelConfig& c, const std::vector<Example>& data) {
  int hit = 0;
  for (const auto& e : data) hit += predict(p, c, e.tokens, e.metadata) == e.label;
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

double grad_norm(const Gradients& g) {
  double s = 0;
  g.visit([&](std::string_view, const MatrixXd& m) { s += m.squaredNorm(); });
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("zero weights give a uniform softmax") {
  const auto c = tiny();
  const auto p = ModelParams::zeros(c);
  const VectorXd probs = forward(p, c, std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}, VectorXd::Ones(3), false, 0);
  for (int k = 0; k < 3; ++k) CHECK(probs(k) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("default shapes") {
  ModelConfig c;
  c.vocab_size = 50;
  c.metadata_dim = 22;
  CHECK(c.conv_length() == 95);
  CHECK(c.pooled_length() == 47);
  CHECK(c.concat_dim() == 32);
  const auto p = ModelParams::initialize(c, 1);
  ForwardCache cache;
  std::vector<int> ids(100, 3);
  const VectorXd probs = forward(p, c, ids, VectorXd::Zero(22), false, 0, &cache);
  CHECK(cache.conv_pre.rows() == 95);
  CHECK(cache.pooled.rows() == 47);
  CHECK(cache.h.cols() == 32);
  CHECK(cache.concat.size() == 32);
  CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((probs.array() >= 0).all());
}

TEST_CASE("inference is deterministic and checks shapes") {
  const auto c = tiny();
  const auto p = ModelParams::initialize(c, 3);
  const std::vector<int> ids{0, 0, 1, 2, 3, 4, 5, 11};
  const VectorXd m = VectorXd::Ones(3);
  CHECK(forward(p, c, ids, m, false, 1) == forward(p, c, ids, m, false, 2));
  CHECK(forward(p, c, ids, m, true, 5) == forward(p, c, ids, m, true, 5));
  CHECK_THROWS_AS(forward(p, c, std::vector<int>{1, 2}, m, false, 0), DataError);
  CHECK_THROWS_AS(forward(p, c, ids, VectorXd::Ones(2), false, 0), DataError);
  CHECK_THROWS_AS(forward(p, c, std::vector<int>{0, 0, 0, 0, 0, 0, 0, 12}, m, false, 0), DataError);
}

TEST_CASE("non-finite activations are numeric errors") {
  const auto c = tiny();
  auto p = ModelParams::initialize(c, 3);
  p.out_b(0, 0) = NAN;
  CHECK_THROWS_AS(forward(p, c, std::vector<int>(8, 1), VectorXd::Ones(3), false, 0), NumericError);
}

TEST_CASE("loss") {
  CHECK(loss((VectorXd(3) << 1, 0, 0).finished(), 0) == doctest::Approx(0.0));
  CHECK(loss(VectorXd::Constant(3, 1.0 / 3.0), 2) == doctest::Approx(std::log(3.0)));
  CHECK(loss((VectorXd(3) << 0.7, 0.2, 0.1).finished(), 1) == doctest::Approx(1.6094).epsilon(1e-4));
  CHECK(loss((VectorXd(3) << 1, 0, 0).finished(), 1) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("saturated correct prediction has a vanishing gradient") {
  const auto c = tiny();
  auto p = ModelParams::initialize(c, 4);
  p.out_b(0, 1) = 60.0;
  Gradients g = ModelParams::zeros(c);
  const std::vector<Example> batch{{std::vector<int>(8, 2), VectorXd::Ones(3), 1}};
  batch_gradients(p, c, batch, false, 0, g);
  CHECK(grad_norm(g) < 1e-6);
}

TEST_CASE("duplicating every example leaves the mean gradient unchanged") {
  const auto c = tiny();
  const auto p = ModelParams::initialize(c, 5);
  const auto data = separable(6, 1);
  std::vector<Example> doubled;
  for (const auto& e : data) {
    doubled.push_back(e);
    doubled.push_back(e);
  }
  Gradients g1 = ModelParams::zeros(c), g2 = ModelParams::zeros(c);
  const double l1 = batch_gradients(p, c, data, false, 0, g1);
  const double l2 = batch_gradients(p, c, doubled, false, 0, g2);
  CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
  g1.visit([&](std::string_view name, const MatrixXd& m) {
    g2.visit([&](std::string_view other, const MatrixXd& n) {
      if (name == other) CHECK_MESSAGE((m - n).norm() <= 1e-12 * (1 + m.norm()), name);
    });
  });
}

TEST_CASE("training on a separable toy set") {
  const auto c = tiny();
  const auto data = separable(100, 2);
  TrainConfig t;
  t.epochs = 10;
  t.batch_size = 10;
  t.learning_rate = 0.01;
  int decreasing = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    t.seed = s;
    const auto r = train(data, c, t);
    CHECK(accuracy(r.params, c, data) >= 0.95);
    decreasing += r.loss_history[1] <= r.loss_history[0] && r.loss_history[2] <= r.loss_history[1];
  }
  CHECK(decreasing >= 2);
}

TEST_CASE("training edge cases") {
  const auto c = tiny();
  const auto data = separable(12, 3);
  TrainConfig t;
  t.seed = 8;
  t.epochs = 0;
  CHECK(train(data, c, t).params == ModelParams::initialize(c, derive_seed(t.seed, 0)));
  t.epochs = 2;
  CHECK(train(data, c, t).params == train(data, c, t).params);
  CHECK_THROWS_AS(train(std::vector<Example>{}, c, t), DataError);
  t.learning_rate = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("argmax ties go to the lowest class") {
  CHECK(argmax((VectorXd(3) << 0.6, 0.3, 0.1).finished()) == 0);
  CHECK(argmax((VectorXd(3) << 0.5, 0.5, 0.0).finished()) == 0);
  CHECK(argmax((VectorXd(3) << 0.2, 0.4, 0.4).finished()) == 1);
}

TEST_CASE("model serialization round trips bit-exactly") {
  ModelBundle b;
  b.config = tiny();
  b.params = ModelParams::initialize(b.config, 7);
  b.scaler = features::MetadataScaler::fit(MatrixXd::Random(5, 3));
  b.vocabulary_sha256 = "abc";
  b.use_metadata = false;
  const std::string bytes = serialize_model(b);
  const auto back = deserialize_model(bytes);
  CHECK(back.config == b.config);
  CHECK(back.params == b.params);
  CHECK(back.scaler.mean == b.scaler.mean);
  CHECK(back.scaler.stddev == b.scaler.stddev);
  CHECK(back.scaler.log_column == b.scaler.log_column);
  CHECK(back.vocabulary_sha256 == "abc");
  CHECK_FALSE(back.use_metadata);
  CHECK(serialize_model(back) == bytes);
  CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 8)), DataError);
  CHECK_THROWS_AS(deserialize_model("NOTAMODEL"), DataError);
}

}
