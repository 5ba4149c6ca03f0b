// Model file layout (all integers little endian, doubles as IEEE-754 bit
// patterns); see docs/model_format.md.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ransomnet/classifiers.hpp"
#include "ransomnet/fingerprint.hpp"

namespace ransomnet {

namespace {

constexpr char kMagic[4] = {'R', 'N', 'M', 'D'};
constexpr std::size_t kChecksumSize = 8;

class Writer {
public:
  void bytes(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { uint(v, 2); }
  void u32(std::uint32_t v) { uint(v, 4); }
  void u64(std::uint64_t v) { uint(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const FeatureVector& v) {
    for (double x : v) f64(x);
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }

  std::string take() { return std::move(out_); }
  const std::string& data() const { return out_; }

private:
  void uint(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class Reader {
public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  FeatureVector vec() {
    FeatureVector v{};
    for (double& x : v) x = f64();
    return v;
  }
  std::vector<double> doubles(std::size_t expected) {
    const std::uint64_t n = u64();
    if (n != expected) malformed("array length mismatch");
    need(n * 8);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = f64();
    return v;
  }
  bool flag() {
    const std::uint8_t v = u8();
    if (v > 1) malformed("boolean field out of range");
    return v == 1;
  }
  std::size_t count(std::size_t unit_bytes) {
    const std::uint64_t n = u64();
    if (unit_bytes != 0 && n > remaining() / unit_bytes) malformed("element count exceeds file size");
    return static_cast<std::size_t>(n);
  }
  std::size_t remaining() const { return data_.size() - pos_; }

  [[noreturn]] static void malformed(const std::string& what) { throw Error(ErrorCode::MalformedModel, what); }

private:
  void need(std::uint64_t n) const {
    if (n > remaining()) malformed("unexpected end of model data");
  }
  std::uint64_t uint(int width) {
    need(static_cast<std::uint64_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_tree(Writer& w, const TreeState& tree) {
  w.u64(tree.nodes.size());
  for (const TreeNode& node : tree.nodes) {
    w.i32(node.feature);
    w.f64(node.threshold);
    w.i32(node.left);
    w.i32(node.right);
    w.u32(node.positives);
    w.u32(node.negatives);
  }
}

constexpr std::size_t kTreeNodeBytes = 4 + 8 + 4 + 4 + 4 + 4;

TreeState read_tree(Reader& r) {
  TreeState tree;
  const std::size_t n = r.count(kTreeNodeBytes);
  if (n == 0) Reader::malformed("tree without nodes");
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& node = tree.nodes[i];
    node.feature = r.i32();
    node.threshold = r.f64();
    node.left = r.i32();
    node.right = r.i32();
    node.positives = r.u32();
    node.negatives = r.u32();
    if (node.feature >= static_cast<std::int32_t>(kFeatureCount) || node.feature < -1) {
      Reader::malformed("tree node feature out of range");
    }
    if (!node.is_leaf()) {
      // Children always follow their parent, which also rules out cycles.
      const auto self = static_cast<std::int64_t>(i);
      const auto size = static_cast<std::int64_t>(n);
      if (node.left <= self || node.right <= self || node.left >= size || node.right >= size) {
        Reader::malformed("tree node child index out of range");
      }
    }
  }
  return tree;
}

void write_hyperparams(Writer& w, const Hyperparams& h) {
  w.u64(h.seed);
  w.u8(h.zero_address_features ? 1 : 0);
  w.u32(h.knn.k);
  w.u32(h.mlp.hidden);
  w.f64(h.mlp.learning_rate);
  w.u32(h.mlp.epochs);
  w.f64(h.mlp.init_range);
  w.u32(h.tree.min_leaf);
  w.u32(h.forest.trees);
  w.u8(h.forest.bootstrap ? 1 : 0);
  w.u32(h.forest.features_per_split);
  w.f64(h.svm.c);
  w.u64(h.svm.iterations);
  w.f64(h.bayes.var_smoothing);
}

Hyperparams read_hyperparams(Reader& r) {
  Hyperparams h;
  h.seed = r.u64();
  h.zero_address_features = r.flag();
  h.knn.k = r.u32();
  h.mlp.hidden = r.u32();
  h.mlp.learning_rate = r.f64();
  h.mlp.epochs = r.u32();
  h.mlp.init_range = r.f64();
  h.tree.min_leaf = r.u32();
  h.forest.trees = r.u32();
  h.forest.bootstrap = r.flag();
  h.forest.features_per_split = r.u32();
  h.svm.c = r.f64();
  h.svm.iterations = r.u64();
  h.bayes.var_smoothing = r.f64();
  return h;
}

void write_parameters(Writer& w, const ModelParameters& parameters) {
  std::visit(
      [&](const auto& s) {
        using State = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<State, KnnState>) {
          w.u64(s.labels.size());
          for (double x : s.rows) w.f64(x);
          for (Label l : s.labels) w.u8(static_cast<std::uint8_t>(l));
        } else if constexpr (std::is_same_v<State, MlpState>) {
          w.u32(s.inputs);
          w.u32(s.hidden);
          w.doubles(s.w1);
          w.doubles(s.b1);
          w.doubles(s.w2);
          w.f64(s.b2);
        } else if constexpr (std::is_same_v<State, TreeState>) {
          write_tree(w, s);
        } else if constexpr (std::is_same_v<State, ForestState>) {
          w.u64(s.trees.size());
          for (std::size_t t = 0; t < s.trees.size(); ++t) {
            w.u16(s.feature_masks[t]);
            write_tree(w, s.trees[t]);
          }
        } else if constexpr (std::is_same_v<State, SvmState>) {
          w.vec(s.weights);
          w.f64(s.bias);
        } else {
          for (std::size_t c = 0; c < 2; ++c) {
            w.f64(s.log_prior[c]);
            w.vec(s.mean[c]);
            w.vec(s.variance[c]);
          }
        }
      },
      parameters);
}

ModelParameters read_parameters(Reader& r, ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::KNearestNeighbor: {
      KnnState s;
      const std::size_t n = r.count(kFeatureCount * 8 + 1);
      s.rows.resize(n * kFeatureCount);
      for (double& x : s.rows) x = r.f64();
      s.labels.resize(n);
      for (Label& l : s.labels) {
        const std::uint8_t v = r.u8();
        if (v > 1) Reader::malformed("label out of range");
        l = static_cast<Label>(v);
      }
      return s;
    }
    case ClassifierKind::MultilayerPerceptron: {
      MlpState s;
      s.inputs = r.u32();
      s.hidden = r.u32();
      if (s.inputs != kFeatureCount) Reader::malformed("MLP input width must be 13");
      if (s.hidden == 0 || s.hidden > r.remaining() / 8) Reader::malformed("MLP hidden width out of range");
      s.w1 = r.doubles(std::size_t{s.inputs} * s.hidden);
      s.b1 = r.doubles(s.hidden);
      s.w2 = r.doubles(s.hidden);
      s.b2 = r.f64();
      return s;
    }
    case ClassifierKind::DecisionTreeJ48:
      return read_tree(r);
    case ClassifierKind::RandomForest: {
      ForestState s;
      const std::size_t n = r.count(2 + 8 + kTreeNodeBytes);
      if (n == 0) Reader::malformed("forest without trees");
      for (std::size_t t = 0; t < n; ++t) {
        s.feature_masks.push_back(r.u16());
        s.trees.push_back(read_tree(r));
      }
      return s;
    }
    case ClassifierKind::SupportVectorMachine: {
      SvmState s;
      s.weights = r.vec();
      s.bias = r.f64();
      return s;
    }
    case ClassifierKind::BayesNetwork: {
      BayesState s;
      for (std::size_t c = 0; c < 2; ++c) {
        s.log_prior[c] = r.f64();
        s.mean[c] = r.vec();
        s.variance[c] = r.vec();
        for (double v : s.variance[c]) {
          if (!(v > 0.0)) Reader::malformed("Bayes variance must be positive");
        }
      }
      return s;
    }
  }
  Reader::malformed("unknown classifier kind");
}

std::uint64_t checksum(std::string_view body) {
  Fnv1a hash;
  hash.update(body);
  return hash.digest();
}

}  // namespace

std::string save_model(const TrainedModel& model) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.kind));
  write_hyperparams(w, model.hyperparams);
  w.u64(model.train_fingerprint);
  w.u8(model.scaler ? 1 : 0);
  if (model.scaler) {
    w.vec(model.scaler->min);
    w.vec(model.scaler->max);
    w.u64(model.scaler->fitted_on);
  }
  write_parameters(w, model.parameters);
  const std::uint64_t sum = checksum(w.data());
  w.u64(sum);
  return w.take();
}

TrainedModel load_model(std::string_view bytes) {
  constexpr std::size_t kHeader = sizeof kMagic + 4;
  if (bytes.size() >= sizeof kMagic && std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::MalformedModel, "not a model file (bad magic)");
  }
  if (bytes.size() < kHeader + kChecksumSize) throw Error(ErrorCode::ChecksumFailure, "model data is truncated");

  Reader header(bytes.substr(sizeof kMagic, 4));
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
  }

  const std::string_view body = bytes.substr(0, bytes.size() - kChecksumSize);
  Reader trailer(bytes.substr(bytes.size() - kChecksumSize));
  if (trailer.u64() != checksum(body)) throw Error(ErrorCode::ChecksumFailure, "model checksum does not match");

  Reader r(body.substr(kHeader));
  TrainedModel model;
  const std::uint8_t kind = r.u8();
  if (kind >= kAllClassifierKinds.size()) Reader::malformed("unknown classifier kind");
  model.kind = static_cast<ClassifierKind>(kind);
  model.hyperparams = read_hyperparams(r);
  model.train_fingerprint = r.u64();
  if (r.flag()) {
    ScalingParams scaler;
    scaler.min = r.vec();
    scaler.max = r.vec();
    scaler.fitted_on = r.u64();
    model.scaler = scaler;
  }
  if (model.scaler.has_value() != uses_scaler(model.kind)) Reader::malformed("scaler presence does not match kind");
  model.parameters = read_parameters(r, model.kind);
  if (r.remaining() != 0) Reader::malformed("trailing bytes after model parameters");
  return model;
}

void save_model_file(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  const std::string bytes = save_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

std::uint64_t model_fingerprint(const TrainedModel& model) {
  Fnv1a hash;
  hash.update(save_model(model));
  return hash.digest();
}

}  // namespace ransomnet
