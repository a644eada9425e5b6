#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "tgr/graph.hpp"
#include "tgr/symbols.hpp"

namespace tgr {

/// The four schema relations, in fixed registration order.
inline constexpr const char* kBaseEntryIs = "base_entry_is";
inline constexpr const char* kRightIs = "right_is";
inline constexpr const char* kBaseLawIs = "base_law_is";
inline constexpr const char* kBelongsTo = "belongs_to";

struct SyntheticKg {
  SymbolTable entities;
  SymbolTable relations;
  KnowledgeGraph kg;
  std::unordered_map<EntityId, std::string> texts;
};

/// Generates a legal-schema graph with planted two-hop structure:
///   - every affair follows 1-3 laws (base_law_is),
///   - every provision belongs to exactly one law (belongs_to),
///   - every affair links to a nonempty random subset of the provisions of
///     its laws, and never to provisions of other laws (base_entry_is),
///   - every affair holds one right entity (right_is).
/// Every entity gets a synthetic description; each base_entry_is link adds
/// three vocabulary words to both endpoint descriptions, so text overlap
/// carries link signal. Deterministic for a fixed seed.
SyntheticKg generate_synthetic_kg(int n_affairs, int n_laws,
                                  int provisions_per_law, std::uint64_t seed);

}  // namespace tgr
