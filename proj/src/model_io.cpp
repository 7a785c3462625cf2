#include "impsense/model_io.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "impsense/io.hpp"

namespace impsense::nn {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "IMPSENSE";

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw DataError("model file truncated");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

json config_to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},     {"seq_len", c.seq_len},         {"embed_dim", c.embed_dim},
          {"conv_filters", c.conv_filters}, {"conv_kernel", c.conv_kernel}, {"dropout_p", c.dropout_p},
          {"pool_size", c.pool_size},       {"lstm_units", c.lstm_units},   {"text_dense", c.text_dense},
          {"meta_dense", c.meta_dense},     {"head_dense", c.head_dense},   {"n_classes", c.n_classes},
          {"metadata_dim", c.metadata_dim}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  j.at("vocab_size").get_to(c.vocab_size);
  j.at("seq_len").get_to(c.seq_len);
  j.at("embed_dim").get_to(c.embed_dim);
  j.at("conv_filters").get_to(c.conv_filters);
  j.at("conv_kernel").get_to(c.conv_kernel);
  j.at("dropout_p").get_to(c.dropout_p);
  j.at("pool_size").get_to(c.pool_size);
  j.at("lstm_units").get_to(c.lstm_units);
  j.at("text_dense").get_to(c.text_dense);
  j.at("meta_dense").get_to(c.meta_dense);
  j.at("head_dense").get_to(c.head_dense);
  j.at("n_classes").get_to(c.n_classes);
  j.at("metadata_dim").get_to(c.metadata_dim);
  return c;
}

// The named arrays of a bundle in file order. Scaler arrays are copied out so
// the log flags can travel as doubles.
struct ArrayList {
  std::vector<std::pair<std::string, MatrixXd*>> entries;
  MatrixXd scaler_mean, scaler_std, scaler_log;
};

void collect(ModelBundle& b, ArrayList& list) {
  b.params.visit([&](std::string_view name, MatrixXd& m) { list.entries.emplace_back(std::string(name), &m); });
  list.entries.emplace_back("scaler_mean", &list.scaler_mean);
  list.entries.emplace_back("scaler_std", &list.scaler_std);
  list.entries.emplace_back("scaler_log", &list.scaler_log);
}

}  // namespace

std::string serialize_model(const ModelBundle& bundle) {
  ModelBundle b = bundle;
  ArrayList list;
  const auto dim = static_cast<Eigen::Index>(b.scaler.mean.size());
  list.scaler_mean = b.scaler.mean.transpose();
  list.scaler_std = b.scaler.stddev.transpose();
  list.scaler_log.resize(1, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    list.scaler_log(0, i) = static_cast<std::size_t>(i) < b.scaler.log_column.size() &&
                                    b.scaler.log_column[static_cast<std::size_t>(i)]
                                ? 1.0
                                : 0.0;
  collect(b, list);

  json header;
  header["model_config"] = config_to_json(b.config);
  header["vocabulary_sha256"] = b.vocabulary_sha256;
  header["use_metadata"] = b.use_metadata;
  header["arrays"] = json::array();
  for (const auto& [name, m] : list.entries) header["arrays"].push_back({{"name", name}, {"shape", {m->rows(), m->cols()}}});
  const std::string h = header.dump();

  std::string out(kMagic);
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint64_t>(out, h.size());
  out += h;
  for (const auto& entry : list.entries) {
    const MatrixXd& m = *entry.second;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) put_le<double>(out, m(i, j));
  }
  return out;
}

ModelBundle deserialize_model(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw DataError("not an impsense model file");
  std::size_t pos = kMagic.size();
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kModelFormatVersion) throw DataError("unsupported model format version " + std::to_string(version));
  const auto hlen = get_le<std::uint64_t>(bytes, pos);
  if (pos + hlen > bytes.size()) throw DataError("model file truncated");
  json header;
  ModelBundle b;
  try {
    header = json::parse(bytes.substr(pos, hlen));
    b.config = config_from_json(header.at("model_config"));
    b.vocabulary_sha256 = header.at("vocabulary_sha256").get<std::string>();
    b.use_metadata = header.at("use_metadata").get<bool>();
  } catch (const json::exception& e) {
    throw DataError(std::string("bad model header: ") + e.what());
  }
  pos += hlen;
  b.config.validate();
  b.params = ModelParams::zeros(b.config);

  ArrayList list;
  collect(b, list);
  const auto& arrays = header.at("arrays");
  if (arrays.size() != list.entries.size()) throw DataError("model file array count mismatch");
  for (std::size_t a = 0; a < list.entries.size(); ++a) {
    const auto& [name, m] = list.entries[a];
    const auto rows = arrays[a].at("shape")[0].get<Eigen::Index>();
    const auto cols = arrays[a].at("shape")[1].get<Eigen::Index>();
    if (arrays[a].at("name").get<std::string>() != name) throw DataError("model file array order mismatch at " + name);
    if (m->size() > 0 && (m->rows() != rows || m->cols() != cols)) throw DataError("shape mismatch for " + name);
    m->resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) (*m)(i, j) = get_le<double>(bytes, pos);
  }
  if (pos != bytes.size()) throw DataError("trailing bytes in model file");

  b.scaler.mean = list.scaler_mean.transpose();
  b.scaler.stddev = list.scaler_std.transpose();
  b.scaler.log_column.clear();
  for (Eigen::Index i = 0; i < list.scaler_log.size(); ++i) b.scaler.log_column.push_back(list.scaler_log(i) != 0.0);
  return b;
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
  io::write_file_atomic(path, serialize_model(bundle));
}

ModelBundle load_model(const std::filesystem::path& path) { return deserialize_model(io::read_file(path)); }

}  // namespace impsense::nn
