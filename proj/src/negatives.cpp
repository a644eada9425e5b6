#include "tgr/negatives.hpp"

namespace tgr {

std::vector<Triple> sample_negatives(const Triple& positive,
                                     const TripleSet& known,
                                     std::int32_t n_entities, int n,
                                     CorruptMode mode, Rng& rng) {
  if (n < 1) throw ConfigError("negative sample count must be >= 1");
  std::vector<Triple> out;
  out.reserve(n);
  const std::uint64_t max_attempts =
      100ull * static_cast<std::uint64_t>(n_entities);
  for (int k = 0; k < n; ++k) {
    bool corrupt_head = mode == CorruptMode::Head ||
                        (mode == CorruptMode::Both && rng.coin());
    Triple neg = positive;
    std::uint64_t attempts = 0;
    do {
      if (++attempts > max_attempts) {
        throw DataError(
            "could not sample a negative triple: vocabulary too small");
      }
      EntityId e = static_cast<EntityId>(rng.below(n_entities));
      if (corrupt_head) {
        neg.head = e;
      } else {
        neg.tail = e;
      }
    } while (known.contains(neg));
    out.push_back(neg);
  }
  return out;
}

}  // namespace tgr
