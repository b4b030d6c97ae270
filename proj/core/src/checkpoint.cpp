#include "fedpg/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace fedpg {

namespace {

class Writer {
 public:
  void bytes(const char* data, std::size_t n) { out_.append(data, n); }

  template <typename T>
  void integer(T value) {
    auto u = static_cast<std::make_unsigned_t<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>(u & 0xFFu));
      u = static_cast<decltype(u)>(u >> 8);
    }
  }

  void f64(double value) { integer(std::bit_cast<std::uint64_t>(value)); }

  void params(const PolicyParams& p) {
    integer(static_cast<std::uint32_t>(p.num_layers()));
    for (int z = 0; z < p.num_layers(); ++z) {
      const DenseLayer& layer = p.layer(z);
      integer(static_cast<std::uint32_t>(layer.weights.rows()));
      integer(static_cast<std::uint32_t>(layer.weights.cols()));
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) f64(layer.weights.data()[i]);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) f64(layer.bias[i]);
    }
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  void bytes(char* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }

  template <typename T>
  T integer() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

  double f64() { return std::bit_cast<double>(integer<std::uint64_t>()); }

  PolicyParams params(const PolicyArchitecture& arch) {
    const auto n_layers = integer<std::uint32_t>();
    if (static_cast<int>(n_layers) != arch.num_layers()) {
      throw CheckpointError("checkpoint: layer count does not match the architecture");
    }
    std::vector<DenseLayer> layers;
    for (int z = 0; z < arch.num_layers(); ++z) {
      const auto rows = integer<std::uint32_t>();
      const auto cols = integer<std::uint32_t>();
      if (static_cast<int>(rows) != arch.layer_output(z) ||
          static_cast<int>(cols) != arch.layer_input(z)) {
        throw CheckpointError("checkpoint: layer shape does not match the architecture");
      }
      DenseLayer layer{RowMatrix(rows, cols), Eigen::VectorXd(rows)};
      need(static_cast<std::size_t>(rows) * (static_cast<std::size_t>(cols) + 1) * 8);
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = f64();
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = f64();
      layers.push_back(std::move(layer));
    }
    return PolicyParams(std::move(layers));
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw CheckpointError("checkpoint: file is truncated");
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t kMaxDim = 1u << 24;

}  // namespace

std::string serialize_checkpoint(const TrainerState& state) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.integer(kCheckpointVersion);
  w.integer(static_cast<std::uint32_t>(state.algorithm));
  const PolicyArchitecture& a = state.architecture;
  w.integer(static_cast<std::uint32_t>(a.input_dim));
  w.integer(static_cast<std::uint32_t>(a.hidden.size()));
  for (int h : a.hidden) w.integer(static_cast<std::uint32_t>(h));
  w.integer(static_cast<std::uint32_t>(a.ris_elements));
  w.integer(static_cast<std::uint32_t>(a.phase_levels));
  w.f64(a.beta_scale);
  w.integer(static_cast<std::uint64_t>(state.epoch));
  w.integer(state.traces_consumed);
  w.integer(state.seed);
  w.params(state.global);
  w.integer(static_cast<std::uint32_t>(state.nodes.size()));
  for (const auto& node : state.nodes) {
    w.integer(static_cast<std::int32_t>(node.partition.e0));
    w.integer(static_cast<std::int32_t>(node.partition.delta_e));
    w.params(node.params);
  }
  return w.take();
}

TrainerState deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[sizeof(kCheckpointMagic)];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kCheckpointMagic))) {
    throw CheckpointError("checkpoint: bad magic, not a checkpoint file");
  }
  const auto version = r.integer<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: unsupported format version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  TrainerState s;
  const auto algo = r.integer<std::uint32_t>();
  if (algo > static_cast<std::uint32_t>(Algorithm::kSvrpg)) {
    throw CheckpointError("checkpoint: unknown algorithm tag");
  }
  s.algorithm = static_cast<Algorithm>(algo);

  auto dim = [&](const char* what) {
    const auto v = r.integer<std::uint32_t>();
    if (v == 0 || v > kMaxDim) throw CheckpointError(std::string("checkpoint: invalid ") + what);
    return static_cast<int>(v);
  };
  PolicyArchitecture& a = s.architecture;
  a.input_dim = dim("input dimension");
  const auto n_hidden = r.integer<std::uint32_t>();
  if (n_hidden > 64) throw CheckpointError("checkpoint: invalid hidden layer count");
  for (std::uint32_t i = 0; i < n_hidden; ++i) a.hidden.push_back(dim("hidden width"));
  a.ris_elements = dim("RIS element count");
  a.phase_levels = dim("phase level count");
  a.beta_scale = r.f64();
  if (!(a.beta_scale > 0)) throw CheckpointError("checkpoint: invalid beta scale");

  const auto epoch = r.integer<std::uint64_t>();
  if (epoch > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw CheckpointError("checkpoint: invalid epoch counter");
  }
  s.epoch = static_cast<int>(epoch);
  s.traces_consumed = r.integer<std::uint64_t>();
  s.seed = r.integer<std::uint64_t>();
  s.global = r.params(a);
  const auto n_nodes = r.integer<std::uint32_t>();
  if (n_nodes > 4096) throw CheckpointError("checkpoint: invalid node count");
  for (std::uint32_t n = 0; n < n_nodes; ++n) {
    NodeState node;
    node.id = static_cast<int>(n);
    node.partition.e0 = r.integer<std::int32_t>();
    node.partition.delta_e = r.integer<std::int32_t>();
    node.params = r.params(a);
    s.nodes.push_back(std::move(node));
  }
  if (!r.at_end()) throw CheckpointError("checkpoint: trailing bytes after the last node");
  return s;
}

void save_checkpoint(const TrainerState& state, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

TrainerState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace fedpg
