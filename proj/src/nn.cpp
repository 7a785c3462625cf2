#include "impsense/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

namespace impsense::nn {
namespace {

using RowVec = RowVector<double>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(0.0);
}

// d/dx relu evaluated at the pre-activation.
template <typename Derived>
auto relu_mask(const Eigen::MatrixBase<Derived>& pre) {
  return (pre.array() > 0.0).template cast<double>();
}

}  // namespace

void ModelConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("model config: ") + what);
  };
  need(vocab_size >= 0, "vocab_size must be >= 0");
  need(embed_dim >= 1 && conv_filters >= 1 && conv_kernel >= 1, "embedding and conv sizes must be positive");
  need(lstm_units >= 1 && text_dense >= 1 && meta_dense >= 1 && head_dense >= 1, "layer widths must be positive");
  need(n_classes >= 2, "n_classes must be >= 2");
  need(metadata_dim >= 1, "metadata_dim must be >= 1");
  need(dropout_p >= 0.0 && dropout_p < 1.0, "dropout_p must lie in [0, 1)");
  need(pool_size >= 1, "pool_size must be >= 1");
  need(conv_length() >= pool_size, "seq_len too short for the conv kernel and pool size");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && epsilon > 0)) throw ConfigError("invalid Adam settings");
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  const int F = cfg.conv_filters, H = cfg.lstm_units;
  ModelParams p;
  p.embedding = MatrixXd::Zero(cfg.vocab_size + 2, cfg.embed_dim);
  p.conv_w = MatrixXd::Zero(cfg.conv_kernel * cfg.embed_dim, F);
  p.conv_b = MatrixXd::Zero(1, F);
  for (int g = 0; g < 4; ++g) {
    p.lstm_w[static_cast<std::size_t>(g)] = MatrixXd::Zero(F + H, H);
    p.lstm_b[static_cast<std::size_t>(g)] = MatrixXd::Zero(1, H);
  }
  p.text_w = MatrixXd::Zero(H, cfg.text_dense);
  p.text_b = MatrixXd::Zero(1, cfg.text_dense);
  p.meta_w = MatrixXd::Zero(cfg.metadata_dim, cfg.meta_dense);
  p.meta_b = MatrixXd::Zero(1, cfg.meta_dense);
  p.head_w = MatrixXd::Zero(cfg.concat_dim(), cfg.head_dense);
  p.head_b = MatrixXd::Zero(1, cfg.head_dense);
  p.out_w = MatrixXd::Zero(cfg.head_dense, cfg.n_classes);
  p.out_b = MatrixXd::Zero(1, cfg.n_classes);
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParams p = zeros(cfg);
  std::mt19937_64 rng(seed);
  auto fill = [&](MatrixXd& m, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
  };
  fill(p.embedding, cfg.embed_dim);
  fill(p.conv_w, cfg.conv_kernel * cfg.embed_dim);
  for (auto& w : p.lstm_w) fill(w, cfg.conv_filters + cfg.lstm_units);
  p.lstm_b[1].setOnes();
  fill(p.text_w, cfg.lstm_units);
  fill(p.meta_w, cfg.metadata_dim);
  fill(p.head_w, cfg.concat_dim());
  fill(p.out_w, cfg.head_dense);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  visit([&](std::string_view, const MatrixXd& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

void ModelParams::set_zero() {
  visit([](std::string_view, MatrixXd& m) { m.setZero(); });
}

bool ModelParams::all_finite() const {
  bool ok = true;
  visit([&](std::string_view, const MatrixXd& m) { ok = ok && m.allFinite(); });
  return ok;
}

bool ModelParams::operator==(const ModelParams& other) const {
  std::vector<const MatrixXd*> mine, theirs;
  visit([&](std::string_view, const MatrixXd& m) { mine.push_back(&m); });
  other.visit([&](std::string_view, const MatrixXd& m) { theirs.push_back(&m); });
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i]->rows() != theirs[i]->rows() || mine[i]->cols() != theirs[i]->cols()) return false;
    if (std::memcmp(mine[i]->data(), theirs[i]->data(), sizeof(double) * static_cast<std::size_t>(mine[i]->size())))
      return false;
  }
  return true;
}

VectorXd forward(const ModelParams& params, const ModelConfig& cfg, std::span<const int> tokens,
                 const VectorXd& metadata, bool train_mode, std::uint64_t seed, ForwardCache* cache) {
  const int L = cfg.seq_len, D = cfg.embed_dim, K = cfg.conv_kernel, F = cfg.conv_filters, H = cfg.lstm_units;
  const int T = cfg.conv_length(), P = cfg.pooled_length(), S = cfg.pool_size;
  if (static_cast<int>(tokens.size()) != L) throw DataError("token sequence length does not match seq_len");
  if (metadata.size() != cfg.metadata_dim) throw DataError("metadata width does not match the model");
  if (params.embedding.rows() != cfg.vocab_size + 2 || params.embedding.cols() != D)
    throw DataError("parameters do not match the model config");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.ids.assign(tokens.begin(), tokens.end());

  c.cols.resize(T, K * D);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const int id = tokens[static_cast<std::size_t>(t + k)];
      if (id < 0 || id > cfg.vocab_size + 1) throw DataError("token id out of range");
      c.cols.block(t, k * D, 1, D) = params.embedding.row(id);
    }
  }
  for (int l = T; l < L; ++l) {
    const int id = tokens[static_cast<std::size_t>(l)];
    if (id < 0 || id > cfg.vocab_size + 1) throw DataError("token id out of range");
  }

  c.conv_pre.noalias() = c.cols * params.conv_w;
  c.conv_pre.rowwise() += params.conv_b.row(0);
  MatrixXd act = relu(c.conv_pre);

  if (train_mode && cfg.dropout_p > 0.0) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(1.0 - cfg.dropout_p);
    const double scale = 1.0 / (1.0 - cfg.dropout_p);
    c.mask.resize(T, F);
    for (Eigen::Index j = 0; j < c.mask.cols(); ++j)
      for (Eigen::Index i = 0; i < c.mask.rows(); ++i) c.mask(i, j) = keep(rng) ? scale : 0.0;
    act.array() *= c.mask.array();
  } else {
    c.mask.resize(0, 0);
  }

  c.pooled.resize(P, F);
  c.pool_arg.resize(P, F);
  for (int p = 0; p < P; ++p) {
    for (int f = 0; f < F; ++f) {
      int best = p * S;
      for (int r = p * S + 1; r < p * S + S; ++r)
        if (act(r, f) > act(best, f)) best = r;
      c.pool_arg(p, f) = best;
      c.pooled(p, f) = act(best, f);
    }
  }

  c.h = MatrixXd::Zero(P + 1, H);
  c.c = MatrixXd::Zero(P + 1, H);
  c.gi.resize(P, H);
  c.gf.resize(P, H);
  c.gg.resize(P, H);
  c.go.resize(P, H);
  RowVec z(F + H);
  for (int t = 0; t < P; ++t) {
    z.head(F) = c.pooled.row(t);
    z.tail(H) = c.h.row(t);
    const RowVec ai = z * params.lstm_w[0] + params.lstm_b[0];
    const RowVec af = z * params.lstm_w[1] + params.lstm_b[1];
    const RowVec ag = z * params.lstm_w[2] + params.lstm_b[2];
    const RowVec ao = z * params.lstm_w[3] + params.lstm_b[3];
    c.gi.row(t) = ai.unaryExpr(&sigmoid);
    c.gf.row(t) = af.unaryExpr(&sigmoid);
    c.gg.row(t) = ag.array().tanh().matrix();
    c.go.row(t) = ao.unaryExpr(&sigmoid);
    c.c.row(t + 1) = c.gf.row(t).cwiseProduct(c.c.row(t)) + c.gi.row(t).cwiseProduct(c.gg.row(t));
    c.h.row(t + 1) = c.go.row(t).cwiseProduct(c.c.row(t + 1).array().tanh().matrix());
  }

  c.text_pre = c.h.row(P) * params.text_w + params.text_b;
  c.meta_in = metadata.transpose();
  c.meta_pre = c.meta_in * params.meta_w + params.meta_b;
  c.concat.resize(cfg.concat_dim());
  c.concat.head(cfg.text_dense) = relu(c.text_pre);
  c.concat.tail(cfg.meta_dense) = relu(c.meta_pre);
  c.head_pre = c.concat * params.head_w + params.head_b;
  c.head_act = relu(c.head_pre);
  const RowVec logits = c.head_act * params.out_w + params.out_b;
  if (!logits.allFinite()) throw NumericError("non-finite logits in forward pass");

  const double mx = logits.maxCoeff();
  RowVec e = (logits.array() - mx).exp().matrix();
  c.probs = e / e.sum();
  return c.probs.transpose();
}

double loss(const VectorXd& probs, int label) {
  if (label < 0 || label >= probs.size()) throw DataError("label out of range");
  const double p = std::clamp(probs(label), 1e-12, 1.0);
  return -std::log(p);
}

void backward(const ModelParams& params, const ModelConfig& cfg, const ForwardCache& c, int label, double scale,
              Gradients& g) {
  const int D = cfg.embed_dim, K = cfg.conv_kernel, F = cfg.conv_filters, H = cfg.lstm_units;
  const int T = cfg.conv_length(), P = cfg.pooled_length();

  // softmax + cross-entropy
  RowVec dlogits = c.probs;
  dlogits(label) -= 1.0;
  dlogits *= scale;

  g.out_w.noalias() += c.head_act.transpose() * dlogits;
  g.out_b += dlogits;
  const RowVec dhead_pre = (dlogits * params.out_w.transpose()).cwiseProduct(relu_mask(c.head_pre).matrix());
  g.head_w.noalias() += c.concat.transpose() * dhead_pre;
  g.head_b += dhead_pre;
  const RowVec dconcat = dhead_pre * params.head_w.transpose();

  const RowVec dmeta_pre = dconcat.tail(cfg.meta_dense).cwiseProduct(relu_mask(c.meta_pre).matrix());
  g.meta_w.noalias() += c.meta_in.transpose() * dmeta_pre;
  g.meta_b += dmeta_pre;

  const RowVec dtext_pre = dconcat.head(cfg.text_dense).cwiseProduct(relu_mask(c.text_pre).matrix());
  g.text_w.noalias() += c.h.row(P).transpose() * dtext_pre;
  g.text_b += dtext_pre;

  // LSTM, back through time
  RowVec dh = dtext_pre * params.text_w.transpose();
  RowVec dc = RowVec::Zero(H);
  MatrixXd dpooled(P, F);
  RowVec z(F + H);
  for (int t = P - 1; t >= 0; --t) {
    const RowVec tanh_c = c.c.row(t + 1).array().tanh().matrix();
    const RowVec i = c.gi.row(t), f = c.gf.row(t), gg = c.gg.row(t), o = c.go.row(t);
    dc += dh.cwiseProduct(o).cwiseProduct((1.0 - tanh_c.array().square()).matrix());
    const RowVec da_o = dh.cwiseProduct(tanh_c).cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));
    const RowVec da_i = dc.cwiseProduct(gg).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
    const RowVec da_f = dc.cwiseProduct(c.c.row(t)).cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
    const RowVec da_g = dc.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
    z.head(F) = c.pooled.row(t);
    z.tail(H) = c.h.row(t);
    const std::array<const RowVec*, 4> da{&da_i, &da_f, &da_g, &da_o};
    RowVec dz = RowVec::Zero(F + H);
    for (std::size_t q = 0; q < 4; ++q) {
      g.lstm_w[q].noalias() += z.transpose() * (*da[q]);
      g.lstm_b[q] += *da[q];
      dz.noalias() += (*da[q]) * params.lstm_w[q].transpose();
    }
    dpooled.row(t) = dz.head(F);
    dh = dz.tail(H);
    dc = dc.cwiseProduct(f);
  }

  // max-pool → dropout → ReLU
  MatrixXd dconv = MatrixXd::Zero(T, F);
  for (int p = 0; p < P; ++p)
    for (int f = 0; f < F; ++f) dconv(c.pool_arg(p, f), f) += dpooled(p, f);
  if (c.mask.size() > 0) dconv.array() *= c.mask.array();
  dconv.array() *= relu_mask(c.conv_pre);

  g.conv_w.noalias() += c.cols.transpose() * dconv;
  g.conv_b += dconv.colwise().sum();
  const MatrixXd dcols = dconv * params.conv_w.transpose();
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) g.embedding.row(c.ids[static_cast<std::size_t>(t + k)]) += dcols.block(t, k * D, 1, D);
}

double batch_gradients(const ModelParams& params, const ModelConfig& cfg, std::span<const Example> batch,
                       bool train_mode, std::uint64_t seed, Gradients& grads) {
  if (batch.empty()) throw DataError("empty batch");
  if (grads.embedding.rows() != params.embedding.rows()) grads = ModelParams::zeros(cfg);
  grads.set_zero();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  ForwardCache cache;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& ex = batch[i];
    const VectorXd probs = forward(params, cfg, ex.tokens, ex.metadata, train_mode, derive_seed(seed, i), &cache);
    total += loss(probs, ex.label);
    backward(params, cfg, cache, ex.label, scale, grads);
  }
  return total * scale;
}

TrainResult train(std::span<const Example> data, const ModelConfig& cfg, const TrainConfig& tcfg) {
  cfg.validate();
  tcfg.validate();
  if (data.empty()) throw DataError("cannot train on an empty dataset");
  TrainResult result;
  result.params = ModelParams::initialize(cfg, derive_seed(tcfg.seed, 0));
  if (tcfg.epochs == 0) return result;

  ModelParams& w = result.params;
  ModelParams m = ModelParams::zeros(cfg);
  ModelParams v = ModelParams::zeros(cfg);
  Gradients grads = ModelParams::zeros(cfg);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Example> batch;
  long step = 0;

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(derive_seed(tcfg.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += static_cast<std::size_t>(tcfg.batch_size), ++b) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(tcfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      const std::uint64_t batch_seed = derive_seed(derive_seed(tcfg.seed, 2000 + static_cast<std::uint64_t>(epoch)), b);
      const double l = batch_gradients(w, cfg, batch, true, batch_seed, grads);
      epoch_loss += l * static_cast<double>(batch.size());

      ++step;
      const double bc1 = 1.0 - std::pow(tcfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(tcfg.beta2, static_cast<double>(step));
      std::vector<MatrixXd*> pw, pm, pv;
      std::vector<const MatrixXd*> pg;
      w.visit([&](std::string_view, MatrixXd& x) { pw.push_back(&x); });
      m.visit([&](std::string_view, MatrixXd& x) { pm.push_back(&x); });
      v.visit([&](std::string_view, MatrixXd& x) { pv.push_back(&x); });
      grads.visit([&](std::string_view, const MatrixXd& x) { pg.push_back(&x); });
      for (std::size_t q = 0; q < pw.size(); ++q) {
        pm[q]->array() = tcfg.beta1 * pm[q]->array() + (1.0 - tcfg.beta1) * pg[q]->array();
        pv[q]->array() = tcfg.beta2 * pv[q]->array() + (1.0 - tcfg.beta2) * pg[q]->array().square();
        pw[q]->array() -= tcfg.learning_rate * (pm[q]->array() / bc1) / ((pv[q]->array() / bc2).sqrt() + tcfg.epsilon);
      }
    }
    if (!w.all_finite()) throw NumericError("training diverged: non-finite weights");
    result.loss_history.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return result;
}

int argmax(const VectorXd& probs) {
  int best = 0;
  for (int i = 1; i < probs.size(); ++i)
    if (probs(i) > probs(best)) best = i;
  return best;
}

int predict(const ModelParams& params, const ModelConfig& cfg, std::span<const int> tokens, const VectorXd& metadata) {
  return argmax(forward(params, cfg, tokens, metadata, false, 0));
}

}  // namespace impsense::nn
