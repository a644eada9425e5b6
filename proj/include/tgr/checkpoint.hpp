#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tgr/config.hpp"
#include "tgr/gnn.hpp"
#include "tgr/mlp.hpp"
#include "tgr/scoring.hpp"

namespace tgr {

/// Versioned binary container: magic, version, a JSON header (stage, epoch,
/// config snapshot, PRNG state, optimizer step), then named tensors in a
/// fixed order as little-endian IEEE-754 doubles. Save -> load -> save is
/// byte-identical, and a reloaded checkpoint resumes training bit-for-bit.
struct Checkpoint {
  ModelConfig config;
  std::string stage = "init";  // init | stage1 | stage2 | random
  std::int64_t epoch = 0;
  std::string prng_state;  // data-stream RNG at checkpoint time

  EmbeddingTable features;  // n_entities x dim
  MlpParams mlp;
  MlpParams mlp_tail;  // present only when !config.tied_mlp
  Vector fallback;
  RelationEmbeddings relations;
  LayerStack stack;  // variant None until stage 2

  std::int64_t opt_step = 0;
  std::vector<std::pair<std::string, Vector>> opt_m, opt_v;

  Eigen::Index n_entities() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  void save(const std::string& path) const;
  void save(std::ostream& os) const;
  static Checkpoint load(const std::string& path);
  static Checkpoint load(std::istream& is);

  std::string to_bytes() const;
};

}  // namespace tgr
