#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tgr/graph.hpp"
#include "tgr/symbols.hpp"

namespace tgr {

struct DatasetSplit {
  std::vector<Triple> train, dev, test;
  std::vector<Triple> target_test;  // test triples with the target relation
};

/// Uniform triple shuffle (seeded), then partition. Train and dev sizes are
/// floor(ratio * n); the remainder goes to test.
DatasetSplit split_dataset(const KnowledgeGraph& kg,
                           std::array<double, 3> ratios,
                           RelationId target_relation, std::uint64_t seed);

/// Exact reuse of a split: per-split indices into the canonical (deduplicated,
/// load-order) triple list, kept in split order.
struct SplitManifest {
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
  std::string target_relation;
  std::vector<std::size_t> train, dev, test;
};

SplitManifest make_manifest(const KnowledgeGraph& kg,
                            std::array<double, 3> ratios,
                            RelationId target_relation,
                            const SymbolTable& relations, std::uint64_t seed);

void write_split_manifest(const std::string& path, const SplitManifest& m);
SplitManifest load_split_manifest(const std::string& path);

DatasetSplit apply_manifest(const SplitManifest& m,
                            const std::vector<Triple>& triples,
                            const SymbolTable& relations);

}  // namespace tgr
