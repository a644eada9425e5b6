#include "tgr/split.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tgr/rng.hpp"

namespace tgr {

namespace {

void check_ratios(const std::array<double, 3>& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  return perm;
}

}  // namespace

SplitManifest make_manifest(const KnowledgeGraph& kg,
                            std::array<double, 3> ratios,
                            RelationId target_relation,
                            const SymbolTable& relations, std::uint64_t seed) {
  check_ratios(ratios);
  if (target_relation < 0 || target_relation >= kg.n_relations) {
    throw DataError("target relation is not in the relation vocabulary");
  }
  const std::size_t n = kg.triples.size();
  std::vector<std::size_t> perm = permutation(n, seed);
  const auto n_train = static_cast<std::size_t>(
      std::floor(ratios[0] * static_cast<double>(n)));
  const auto n_dev = static_cast<std::size_t>(
      std::floor(ratios[1] * static_cast<double>(n)));

  SplitManifest m;
  m.ratios = ratios;
  m.seed = seed;
  m.target_relation = relations.name(target_relation);
  m.train.assign(perm.begin(), perm.begin() + n_train);
  m.dev.assign(perm.begin() + n_train, perm.begin() + n_train + n_dev);
  m.test.assign(perm.begin() + n_train + n_dev, perm.end());
  return m;
}

DatasetSplit apply_manifest(const SplitManifest& m,
                            const std::vector<Triple>& triples,
                            const SymbolTable& relations) {
  RelationId target = relations.find(m.target_relation);
  if (target < 0) {
    throw DataError("target relation `" + m.target_relation +
                    "` is not in the relation vocabulary");
  }
  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<Triple> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(triples.at(i));
    return out;
  };
  DatasetSplit split;
  split.train = gather(m.train);
  split.dev = gather(m.dev);
  split.test = gather(m.test);
  for (const Triple& t : split.test) {
    if (t.relation == target) split.target_test.push_back(t);
  }
  return split;
}

DatasetSplit split_dataset(const KnowledgeGraph& kg,
                           std::array<double, 3> ratios,
                           RelationId target_relation, std::uint64_t seed) {
  // Relation names are irrelevant here; route through a scratch table so the
  // manifest path and the direct path are the same code.
  SymbolTable scratch;
  for (std::int32_t r = 0; r < kg.n_relations; ++r) {
    scratch.intern("r" + std::to_string(r));
  }
  SplitManifest m =
      make_manifest(kg, ratios, target_relation, scratch, seed);
  return apply_manifest(m, kg.triples, scratch);
}

void write_split_manifest(const std::string& path, const SplitManifest& m) {
  nlohmann::json j;
  j["ratios"] = m.ratios;
  j["seed"] = m.seed;
  j["target_relation"] = m.target_relation;
  j["train"] = m.train;
  j["dev"] = m.dev;
  j["test"] = m.test;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << '\n';
}

SplitManifest load_split_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  SplitManifest m;
  try {
    m.ratios = j.at("ratios").get<std::array<double, 3>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.target_relation = j.at("target_relation").get<std::string>();
    m.train = j.at("train").get<std::vector<std::size_t>>();
    m.dev = j.at("dev").get<std::vector<std::size_t>>();
    m.test = j.at("test").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad manifest: " + e.what());
  }
  return m;
}

}  // namespace tgr
