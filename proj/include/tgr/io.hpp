#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "tgr/common.hpp"
#include "tgr/graph.hpp"
#include "tgr/symbols.hpp"

namespace tgr {

struct TripleLoadResult {
  std::vector<Triple> triples;       // deduplicated, first-appearance order
  std::size_t duplicates_removed = 0;
};

/// Reads `head<TAB>relation<TAB>tail` lines (UTF-8, no header). Unseen names
/// are registered in first-appearance order. Exact duplicate triples are
/// dropped and counted. Malformed lines and self-links raise DataError with
/// the 1-based line number.
TripleLoadResult load_triples(const std::string& path, SymbolTable& entities,
                              SymbolTable& relations);

/// Writes triples in the given (canonical) order, same format as load_triples.
void write_triples(const std::string& path, const std::vector<Triple>& triples,
                   const SymbolTable& entities, const SymbolTable& relations);

struct TextLoadResult {
  std::unordered_map<EntityId, std::string> texts;
  std::vector<std::string> unknown_ids;  // records rejected for unknown entity
};

/// Reads one JSON object per line with string fields `id` and `text`.
/// Records whose id is not in the entity vocabulary are rejected into
/// `unknown_ids`. Invalid JSON or a duplicate id raises DataError.
TextLoadResult load_entity_texts(const std::string& path,
                                 const SymbolTable& entities);

/// Precomputed raw entity vectors: TSV `id\tv1\t...\tvraw_dim`.
struct PrecomputedEmbeddings {
  std::unordered_map<std::string, std::size_t> row_of;
  EmbeddingTable rows;  // one row per record, width raw_dim

  const EmbeddingTable& table() const { return rows; }

  /// Throws DataError naming the entity if absent.
  Vector lookup(const std::string& entity_name) const;
};

PrecomputedEmbeddings load_precomputed_embeddings(const std::string& path);

}  // namespace tgr
