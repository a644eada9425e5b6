#include "tgr/config.hpp"

#include <fstream>
#include <set>

namespace tgr {

std::string to_string(ScoreVariant v) {
  switch (v) {
    case ScoreVariant::TransE: return "transe";
    case ScoreVariant::DistMult: return "distmult";
    case ScoreVariant::Simple: return "simple";
    case ScoreVariant::SimpleCanonical: return "simple-canonical";
  }
  return "?";
}

ScoreVariant score_variant_from_string(const std::string& s) {
  if (s == "transe") return ScoreVariant::TransE;
  if (s == "distmult") return ScoreVariant::DistMult;
  if (s == "simple") return ScoreVariant::Simple;
  if (s == "simple-canonical") return ScoreVariant::SimpleCanonical;
  throw ConfigError("unknown score variant `" + s + "`");
}

std::string to_string(GnnVariant v) {
  switch (v) {
    case GnnVariant::Gat: return "gat";
    case GnnVariant::Rgcn: return "rgcn";
    case GnnVariant::None: return "none";
  }
  return "?";
}

GnnVariant gnn_variant_from_string(const std::string& s) {
  if (s == "gat") return GnnVariant::Gat;
  if (s == "rgcn") return GnnVariant::Rgcn;
  if (s == "none") return GnnVariant::None;
  throw ConfigError("unknown gnn variant `" + s + "`");
}

std::string to_string(CorruptMode m) {
  switch (m) {
    case CorruptMode::Head: return "head";
    case CorruptMode::Tail: return "tail";
    case CorruptMode::Both: return "both";
  }
  return "?";
}

CorruptMode corrupt_mode_from_string(const std::string& s) {
  if (s == "head") return CorruptMode::Head;
  if (s == "tail") return CorruptMode::Tail;
  if (s == "both") return CorruptMode::Both;
  throw ConfigError("unknown corrupt mode `" + s + "`");
}

std::string to_string(EncoderVariant v) {
  return v == EncoderVariant::HashedNgram ? "hashed-ngram" : "precomputed-file";
}

EncoderVariant encoder_variant_from_string(const std::string& s) {
  if (s == "hashed-ngram") return EncoderVariant::HashedNgram;
  if (s == "precomputed-file") return EncoderVariant::PrecomputedFile;
  throw ConfigError("unknown encoder variant `" + s + "`");
}

std::string to_string(OptimizerVariant v) {
  return v == OptimizerVariant::Adam ? "adam" : "sgd";
}

OptimizerVariant optimizer_variant_from_string(const std::string& s) {
  if (s == "adam") return OptimizerVariant::Adam;
  if (s == "sgd") return OptimizerVariant::Sgd;
  throw ConfigError("unknown optimizer `" + s + "`");
}

void ModelConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  encoder.validate();
  score.validate();
  if (encoder.raw_dim < dim) {
    throw ConfigError("encoder raw_dim must be >= dim");
  }
  if (score.variant == ScoreVariant::SimpleCanonical && dim % 2 != 0) {
    throw ConfigError("simple-canonical requires an even dim");
  }
  if (gnn != GnnVariant::None && (depth < 1 || depth > 4)) {
    throw ConfigError("gnn depth must be in 1..4");
  }
  if (heads < 1) throw ConfigError("gnn heads must be >= 1");
  auto check_stage = [](double lr, int epochs, double margin, int negs,
                        const char* stage) {
    if (!(lr > 0.0)) throw ConfigError(std::string(stage) + ": lr must be > 0");
    if (epochs < 0) throw ConfigError(std::string(stage) + ": epochs must be >= 0");
    if (!(margin > 0.0)) {
      throw ConfigError(std::string(stage) + ": margin must be > 0");
    }
    if (negs < 1) {
      throw ConfigError(std::string(stage) +
                        ": negatives_per_positive must be >= 1");
    }
  };
  check_stage(stage1.lr, stage1.epochs, stage1.margin,
              stage1.negatives_per_positive, "stage1");
  check_stage(stage2.lr, stage2.epochs, stage2.margin,
              stage2.negatives_per_positive, "stage2");
  if (stage1.batch_size < 1) throw ConfigError("stage1: batch_size must be >= 1");
  if (stage1.warmup_fraction < 0.0 || stage1.warmup_fraction > 1.0) {
    throw ConfigError("stage1: warmup_fraction must be in [0, 1]");
  }
  if (stage1.p_norm != 1 && stage1.p_norm != 2) {
    throw ConfigError("stage1: p_norm must be 1 or 2");
  }
  if (stage2.eval_every < 1) throw ConfigError("stage2: eval_every must be >= 1");
  if (stage2.patience < 1) throw ConfigError("stage2: patience must be >= 1");
}

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError("unknown config key `" + key + "` in " + where);
    }
  }
}

template <class T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for config key `" + std::string(key) +
                        "`: " + e.what());
    }
  }
}

void get_if_enum(const nlohmann::json& j, const char* key, std::string& out) {
  get_if(j, key, out);
}

}  // namespace

nlohmann::json ModelConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["dim"] = dim;
  j["encoder"] = {{"variant", to_string(encoder.variant)},
                  {"raw_dim", encoder.raw_dim},
                  {"ngram_min", encoder.ngram_min},
                  {"ngram_max", encoder.ngram_max},
                  {"hash_seed", encoder.hash_seed},
                  {"file", encoder.file_path}};
  j["score"] = {{"variant", to_string(score.variant)},
                {"p_norm", score.p_norm}};
  j["gnn"] = {{"variant", to_string(gnn)},
              {"depth", depth},
              {"heads", heads},
              {"leaky_slope", leaky_slope}};
  j["mlp"] = {{"tied", tied_mlp}};
  j["optimizer"] = {{"variant", to_string(optimizer.variant)},
                    {"beta1", optimizer.beta1},
                    {"beta2", optimizer.beta2},
                    {"eps", optimizer.eps}};
  j["stage1"] = {{"lr", stage1.lr},
                 {"epochs", stage1.epochs},
                 {"batch_size", stage1.batch_size},
                 {"margin", stage1.margin},
                 {"negatives_per_positive", stage1.negatives_per_positive},
                 {"warmup_fraction", stage1.warmup_fraction},
                 {"corrupt_mode", to_string(stage1.corrupt_mode)},
                 {"p_norm", stage1.p_norm},
                 {"entity_norm", stage1.entity_norm}};
  j["stage2"] = {{"lr", stage2.lr},
                 {"epochs", stage2.epochs},
                 {"margin", stage2.margin},
                 {"negatives_per_positive", stage2.negatives_per_positive},
                 {"corrupt_mode", to_string(stage2.corrupt_mode)},
                 {"freeze_text", stage2.freeze_text},
                 {"zero_init_stack", stage2.zero_init_stack},
                 {"early_stop", stage2.early_stop},
                 {"eval_every", stage2.eval_every},
                 {"patience", stage2.patience}};
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  reject_unknown_keys(j,
                      {"seed", "dim", "encoder", "score", "gnn", "mlp",
                       "optimizer", "stage1", "stage2"},
                      "config");
  get_if(j, "seed", c.seed);
  get_if(j, "dim", c.dim);
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    reject_unknown_keys(
        e, {"variant", "raw_dim", "ngram_min", "ngram_max", "hash_seed", "file"},
        "encoder");
    std::string variant = to_string(c.encoder.variant);
    get_if_enum(e, "variant", variant);
    c.encoder.variant = encoder_variant_from_string(variant);
    get_if(e, "raw_dim", c.encoder.raw_dim);
    get_if(e, "ngram_min", c.encoder.ngram_min);
    get_if(e, "ngram_max", c.encoder.ngram_max);
    get_if(e, "hash_seed", c.encoder.hash_seed);
    get_if(e, "file", c.encoder.file_path);
  }
  if (j.contains("score")) {
    const auto& s = j.at("score");
    reject_unknown_keys(s, {"variant", "p_norm"}, "score");
    std::string variant = to_string(c.score.variant);
    get_if_enum(s, "variant", variant);
    c.score.variant = score_variant_from_string(variant);
    get_if(s, "p_norm", c.score.p_norm);
  }
  if (j.contains("gnn")) {
    const auto& g = j.at("gnn");
    reject_unknown_keys(g, {"variant", "depth", "heads", "leaky_slope"}, "gnn");
    std::string variant = to_string(c.gnn);
    get_if_enum(g, "variant", variant);
    c.gnn = gnn_variant_from_string(variant);
    get_if(g, "depth", c.depth);
    get_if(g, "heads", c.heads);
    get_if(g, "leaky_slope", c.leaky_slope);
  }
  if (j.contains("mlp")) {
    reject_unknown_keys(j.at("mlp"), {"tied"}, "mlp");
    get_if(j.at("mlp"), "tied", c.tied_mlp);
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    reject_unknown_keys(o, {"variant", "beta1", "beta2", "eps"}, "optimizer");
    std::string variant = to_string(c.optimizer.variant);
    get_if_enum(o, "variant", variant);
    c.optimizer.variant = optimizer_variant_from_string(variant);
    get_if(o, "beta1", c.optimizer.beta1);
    get_if(o, "beta2", c.optimizer.beta2);
    get_if(o, "eps", c.optimizer.eps);
  }
  if (j.contains("stage1")) {
    const auto& s = j.at("stage1");
    reject_unknown_keys(s,
                        {"lr", "epochs", "batch_size", "margin",
                         "negatives_per_positive", "warmup_fraction",
                         "corrupt_mode", "p_norm", "entity_norm"},
                        "stage1");
    get_if(s, "lr", c.stage1.lr);
    get_if(s, "epochs", c.stage1.epochs);
    get_if(s, "batch_size", c.stage1.batch_size);
    get_if(s, "margin", c.stage1.margin);
    get_if(s, "negatives_per_positive", c.stage1.negatives_per_positive);
    get_if(s, "warmup_fraction", c.stage1.warmup_fraction);
    std::string mode = to_string(c.stage1.corrupt_mode);
    get_if_enum(s, "corrupt_mode", mode);
    c.stage1.corrupt_mode = corrupt_mode_from_string(mode);
    get_if(s, "p_norm", c.stage1.p_norm);
    get_if(s, "entity_norm", c.stage1.entity_norm);
  }
  if (j.contains("stage2")) {
    const auto& s = j.at("stage2");
    reject_unknown_keys(s,
                        {"lr", "epochs", "margin", "negatives_per_positive",
                         "corrupt_mode", "freeze_text", "zero_init_stack",
                         "early_stop", "eval_every", "patience"},
                        "stage2");
    get_if(s, "lr", c.stage2.lr);
    get_if(s, "epochs", c.stage2.epochs);
    get_if(s, "margin", c.stage2.margin);
    get_if(s, "negatives_per_positive", c.stage2.negatives_per_positive);
    std::string mode = to_string(c.stage2.corrupt_mode);
    get_if_enum(s, "corrupt_mode", mode);
    c.stage2.corrupt_mode = corrupt_mode_from_string(mode);
    get_if(s, "freeze_text", c.stage2.freeze_text);
    get_if(s, "zero_init_stack", c.stage2.zero_init_stack);
    get_if(s, "early_stop", c.stage2.early_stop);
    get_if(s, "eval_every", c.stage2.eval_every);
    get_if(s, "patience", c.stage2.patience);
  }
  c.validate();
  return c;
}

ModelConfig ModelConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace tgr
