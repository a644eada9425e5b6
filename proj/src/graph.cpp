#include "tgr/graph.hpp"

#include <string>

namespace tgr {

KnowledgeGraph KnowledgeGraph::build(std::int32_t n_entities,
                                     std::int32_t n_relations,
                                     std::vector<Triple> triples) {
  KnowledgeGraph kg;
  kg.n_entities = n_entities;
  kg.n_relations = n_relations;
  kg.triples = std::move(triples);
  kg.adjacency = build_adjacency(n_entities, kg.triples);
  return kg;
}

std::vector<std::vector<Edge>> KnowledgeGraph::build_adjacency(
    std::int32_t n_entities, const std::vector<Triple>& triples) {
  std::vector<std::vector<Edge>> adj(n_entities);
  for (const Triple& t : triples) {
    adj.at(t.head).push_back(Edge{t.relation, false, t.tail});
    adj.at(t.tail).push_back(Edge{t.relation, true, t.head});
  }
  return adj;
}

std::size_t KnowledgeGraph::adjacency_edge_count() const {
  std::size_t n = 0;
  for (const auto& edges : adjacency) n += edges.size();
  return n;
}

void validate_schema(const KnowledgeGraph& kg) {
  for (std::size_t i = 0; i < kg.triples.size(); ++i) {
    const Triple& t = kg.triples[i];
    if (t.head < 0 || t.head >= kg.n_entities || t.tail < 0 ||
        t.tail >= kg.n_entities || t.relation < 0 ||
        t.relation >= kg.n_relations) {
      throw DataError("triple " + std::to_string(i) +
                      " has out-of-vocabulary ids");
    }
    if (t.head == t.tail) {
      throw DataError("triple " + std::to_string(i) +
                      " is a self-link, which the schema forbids");
    }
  }
}

}  // namespace tgr
