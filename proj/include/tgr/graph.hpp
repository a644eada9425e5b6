#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "tgr/common.hpp"
#include "tgr/rng.hpp"

namespace tgr {

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(t.head));
    h = splitmix64(h ^ static_cast<std::uint64_t>(t.relation));
    h = splitmix64(h ^ static_cast<std::uint64_t>(t.tail));
    return static_cast<std::size_t>(h);
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

inline TripleSet make_triple_set(const std::vector<Triple>& triples) {
  TripleSet s;
  s.reserve(triples.size() * 2);
  for (const Triple& t : triples) s.insert(t);
  return s;
}

/// One direction-tagged adjacency entry. A triple (h, r, t) contributes a
/// forward edge (r, t) at h and an inverse edge (r, h) at t.
struct Edge {
  RelationId relation = 0;
  bool inverse = false;
  EntityId neighbor = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct KnowledgeGraph {
  std::int32_t n_entities = 0;
  std::int32_t n_relations = 0;
  std::vector<Triple> triples;
  std::vector<std::vector<Edge>> adjacency;  // size n_entities

  static KnowledgeGraph build(std::int32_t n_entities, std::int32_t n_relations,
                              std::vector<Triple> triples);

  /// Canonical adjacency: scan triples in order, append forward then inverse.
  static std::vector<std::vector<Edge>> build_adjacency(
      std::int32_t n_entities, const std::vector<Triple>& triples);

  std::size_t adjacency_edge_count() const;
};

/// Checks the legal-schema invariants on a loaded/generated graph: ids in
/// vocabulary and no self-links. Throws DataError.
void validate_schema(const KnowledgeGraph& kg);

}  // namespace tgr
