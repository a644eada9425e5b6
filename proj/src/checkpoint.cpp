#include "tgr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace tgr {

namespace {

constexpr char kMagic[8] = {'T', 'G', 'R', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

template <class T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw DataError("truncated checkpoint");
  return value;
}

void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  auto len = read_pod<std::uint32_t>(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw DataError("truncated checkpoint");
  return s;
}

struct TensorRef {
  std::string name;
  const double* data;
  std::uint64_t rows, cols;
};

void write_tensor(std::ostream& os, const TensorRef& t) {
  write_string(os, t.name);
  write_pod<std::uint64_t>(os, t.rows);
  write_pod<std::uint64_t>(os, t.cols);
  os.write(reinterpret_cast<const char*>(t.data),
           static_cast<std::streamsize>(t.rows * t.cols * sizeof(double)));
}

struct LoadedTensor {
  std::uint64_t rows = 0, cols = 0;
  std::vector<double> values;
};

// Matrix tensors are stored row-major (the native layout of EmbeddingTable);
// column-major Matrix fields go through a row-major staging copy.
EmbeddingTable to_row_major(const Matrix& m) { return m; }

void collect(std::vector<TensorRef>& refs, std::deque<EmbeddingTable>& staged,
             const std::string& name, const Matrix& m) {
  staged.push_back(to_row_major(m));
  refs.push_back(TensorRef{name, staged.back().data(),
                           static_cast<std::uint64_t>(m.rows()),
                           static_cast<std::uint64_t>(m.cols())});
}

void collect(std::vector<TensorRef>& refs, const std::string& name,
             const EmbeddingTable& m) {
  refs.push_back(TensorRef{name, m.data(), static_cast<std::uint64_t>(m.rows()),
                           static_cast<std::uint64_t>(m.cols())});
}

void collect(std::vector<TensorRef>& refs, const std::string& name,
             const Vector& v) {
  refs.push_back(
      TensorRef{name, v.data(), static_cast<std::uint64_t>(v.size()), 1});
}

Matrix as_matrix(const LoadedTensor& t, const std::string& name) {
  Matrix m(static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols));
  for (std::uint64_t i = 0; i < t.rows; ++i) {
    for (std::uint64_t j = 0; j < t.cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          t.values[i * t.cols + j];
    }
  }
  (void)name;
  return m;
}

EmbeddingTable as_table(const LoadedTensor& t) {
  EmbeddingTable m(static_cast<Eigen::Index>(t.rows),
                   static_cast<Eigen::Index>(t.cols));
  std::memcpy(m.data(), t.values.data(), t.values.size() * sizeof(double));
  return m;
}

Vector as_vector(const LoadedTensor& t, const std::string& name) {
  if (t.cols != 1) throw DataError("checkpoint tensor " + name + " is not a vector");
  Vector v(static_cast<Eigen::Index>(t.rows));
  std::memcpy(v.data(), t.values.data(), t.values.size() * sizeof(double));
  return v;
}

}  // namespace

void Checkpoint::save(std::ostream& os) const {
  nlohmann::json header;
  header["stage"] = stage;
  header["epoch"] = epoch;
  header["config"] = config.to_json();
  header["prng_state"] = prng_state;
  header["opt_step"] = opt_step;
  const std::string header_str = header.dump();

  std::vector<TensorRef> refs;
  std::deque<EmbeddingTable> staged;  // stable element addresses

  collect(refs, "features", features);
  collect(refs, staged, "mlp.W", mlp.W);
  collect(refs, "mlp.b", mlp.b);
  if (!config.tied_mlp) {
    collect(refs, staged, "mlp_tail.W", mlp_tail.W);
    collect(refs, "mlp_tail.b", mlp_tail.b);
  }
  collect(refs, "fallback", fallback);
  collect(refs, "rel.forward", relations.forward);
  collect(refs, "rel.inverse", relations.inverse);
  for (std::size_t l = 0; l < stack.gat_layers.size(); ++l) {
    for (std::size_t h = 0; h < stack.gat_layers[l].heads.size(); ++h) {
      std::string base = "stack.l" + std::to_string(l) + ".h" + std::to_string(h);
      collect(refs, staged, base + ".W", stack.gat_layers[l].heads[h].W);
      collect(refs, base + ".a", stack.gat_layers[l].heads[h].a);
    }
  }
  for (std::size_t l = 0; l < stack.rgcn_layers.size(); ++l) {
    std::string base = "stack.l" + std::to_string(l);
    for (std::size_t k = 0; k < stack.rgcn_layers[l].w_rel.size(); ++k) {
      collect(refs, staged, base + ".rel" + std::to_string(k),
              stack.rgcn_layers[l].w_rel[k]);
    }
    collect(refs, staged, base + ".self", stack.rgcn_layers[l].w_self);
  }
  for (const auto& [name, v] : opt_m) collect(refs, "opt.m." + name, v);
  for (const auto& [name, v] : opt_v) collect(refs, "opt.v." + name, v);

  os.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(os, kVersion);
  write_string(os, header_str);
  write_pod<std::uint64_t>(os, refs.size());
  for (const TensorRef& t : refs) write_tensor(os, t);
  if (!os) throw DataError("checkpoint write failed");
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  save(out);
}

std::string Checkpoint::to_bytes() const {
  std::ostringstream os(std::ios::binary);
  save(os);
  return os.str();
}

Checkpoint Checkpoint::load(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file");
  }
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_string(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("bad checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.config = ModelConfig::from_json(header.at("config"));
  ckpt.stage = header.at("stage").get<std::string>();
  ckpt.epoch = header.at("epoch").get<std::int64_t>();
  ckpt.prng_state = header.at("prng_state").get<std::string>();
  ckpt.opt_step = header.at("opt_step").get<std::int64_t>();

  const auto n_tensors = read_pod<std::uint64_t>(is);
  std::map<std::string, LoadedTensor> tensors;
  std::vector<std::string> order;
  for (std::uint64_t i = 0; i < n_tensors; ++i) {
    std::string name = read_string(is);
    LoadedTensor t;
    t.rows = read_pod<std::uint64_t>(is);
    t.cols = read_pod<std::uint64_t>(is);
    t.values.resize(t.rows * t.cols);
    is.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!is) throw DataError("truncated checkpoint tensor " + name);
    order.push_back(name);
    tensors.emplace(std::move(name), std::move(t));
  }

  auto take = [&](const std::string& name) -> const LoadedTensor& {
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw DataError("checkpoint is missing tensor " + name);
    }
    return it->second;
  };
  auto has = [&](const std::string& name) { return tensors.contains(name); };

  ckpt.features = as_table(take("features"));
  ckpt.mlp.W = as_matrix(take("mlp.W"), "mlp.W");
  ckpt.mlp.b = as_vector(take("mlp.b"), "mlp.b");
  if (!ckpt.config.tied_mlp) {
    ckpt.mlp_tail.W = as_matrix(take("mlp_tail.W"), "mlp_tail.W");
    ckpt.mlp_tail.b = as_vector(take("mlp_tail.b"), "mlp_tail.b");
  }
  ckpt.fallback = as_vector(take("fallback"), "fallback");
  ckpt.relations.forward = as_table(take("rel.forward"));
  ckpt.relations.inverse = as_table(take("rel.inverse"));

  // Stack tensors, if any, were written layer by layer.
  if (has("stack.l0.h0.W")) {
    ckpt.stack.variant = GnnVariant::Gat;
    for (int l = 0;; ++l) {
      std::string lbase = "stack.l" + std::to_string(l);
      if (!has(lbase + ".h0.W")) break;
      GatLayer layer;
      for (int h = 0;; ++h) {
        std::string base = lbase + ".h" + std::to_string(h);
        if (!has(base + ".W")) break;
        GatParams p;
        p.W = as_matrix(take(base + ".W"), base + ".W");
        p.a = as_vector(take(base + ".a"), base + ".a");
        p.leaky_slope = ckpt.config.leaky_slope;
        layer.heads.push_back(std::move(p));
      }
      ckpt.stack.gat_layers.push_back(std::move(layer));
    }
  } else if (has("stack.l0.self")) {
    ckpt.stack.variant = GnnVariant::Rgcn;
    for (int l = 0;; ++l) {
      std::string lbase = "stack.l" + std::to_string(l);
      if (!has(lbase + ".self")) break;
      RgcnParams p;
      for (int k = 0;; ++k) {
        std::string name = lbase + ".rel" + std::to_string(k);
        if (!has(name)) break;
        p.w_rel.push_back(as_matrix(take(name), name));
      }
      p.w_self = as_matrix(take(lbase + ".self"), lbase + ".self");
      ckpt.stack.rgcn_layers.push_back(std::move(p));
    }
  }

  for (const std::string& name : order) {
    if (name.starts_with("opt.m.")) {
      ckpt.opt_m.emplace_back(name.substr(6), as_vector(take(name), name));
    } else if (name.starts_with("opt.v.")) {
      ckpt.opt_v.emplace_back(name.substr(6), as_vector(take(name), name));
    }
  }
  return ckpt;
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return load(in);
}

}  // namespace tgr
