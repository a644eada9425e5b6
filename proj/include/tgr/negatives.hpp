#pragma once

#include <vector>

#include "tgr/graph.hpp"
#include "tgr/rng.hpp"

namespace tgr {

enum class CorruptMode { Head, Tail, Both };

/// Corrupts the head or the tail (mode Both: fair coin per sample) with a
/// uniform random entity, resampling until the corrupted triple is absent
/// from `known` (filtered negatives). Throws DataError after 100 * n_entities
/// failed attempts for a single negative.
std::vector<Triple> sample_negatives(const Triple& positive,
                                     const TripleSet& known,
                                     std::int32_t n_entities, int n,
                                     CorruptMode mode, Rng& rng);

}  // namespace tgr
