#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tgr/gnn.hpp"
#include "tgr/negatives.hpp"
#include "tgr/params.hpp"
#include "tgr/scoring.hpp"
#include "tgr/text.hpp"

namespace tgr {

struct Stage1Config {
  double lr = 5e-5;
  int epochs = 6;
  int batch_size = 64;
  double margin = 1.0;
  int negatives_per_positive = 1;
  double warmup_fraction = 0.1;
  CorruptMode corrupt_mode = CorruptMode::Both;
  int p_norm = 2;           // stage 1 always optimizes the TransE objective
  bool entity_norm = false; // project feature vectors onto the unit ball
};

struct Stage2Config {
  double lr = 0.01;
  int epochs = 4000;
  double margin = 1.0;
  int negatives_per_positive = 1;
  CorruptMode corrupt_mode = CorruptMode::Both;
  bool freeze_text = true;
  bool zero_init_stack = false;
  bool early_stop = false;
  int eval_every = 50;
  int patience = 10;
};

/// Every knob of the pipeline; serialized into checkpoints so a run can be
/// reproduced from its artifacts alone.
struct ModelConfig {
  std::uint64_t seed = 42;
  int dim = 400;
  TextEncoderSpec encoder;
  ScoreFnSpec score;
  GnnVariant gnn = GnnVariant::Gat;
  int depth = 2;
  int heads = 1;
  double leaky_slope = 0.2;
  bool tied_mlp = true;
  OptimizerConfig optimizer;
  Stage1Config stage1;
  Stage2Config stage2;

  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  static ModelConfig load(const std::string& path);
};

// enum <-> string names used in configs, CLI flags and reports
std::string to_string(ScoreVariant v);
ScoreVariant score_variant_from_string(const std::string& s);
std::string to_string(GnnVariant v);
GnnVariant gnn_variant_from_string(const std::string& s);
std::string to_string(CorruptMode m);
CorruptMode corrupt_mode_from_string(const std::string& s);
std::string to_string(EncoderVariant v);
EncoderVariant encoder_variant_from_string(const std::string& s);
std::string to_string(OptimizerVariant v);
OptimizerVariant optimizer_variant_from_string(const std::string& s);

}  // namespace tgr
