#include "tgr/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "tgr/rng.hpp"

namespace tgr {

namespace {

// Text-channel knobs. The word pool is small enough that unrelated links
// occasionally reuse words, keeping the lexical signal noisy.
constexpr int kWordsPerLink = 3;
constexpr int kNoiseWordsPerEntity = 4;
constexpr int kWordPool = 512;
constexpr double kProvisionLinkProb = 0.3;

std::string word(std::uint64_t w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%03llu",
                static_cast<unsigned long long>(w));
  return buf;
}

std::string format_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%03d", prefix, i);
  return buf;
}

}  // namespace

SyntheticKg generate_synthetic_kg(int n_affairs, int n_laws,
                                  int provisions_per_law, std::uint64_t seed) {
  if (n_affairs < 1 || n_laws < 1 || provisions_per_law < 1) {
    throw ConfigError("synthetic graph sizes must all be >= 1");
  }
  Rng rng(seed);
  SyntheticKg out;

  std::vector<EntityId> affairs, laws, rights;
  std::vector<std::vector<EntityId>> provisions_of(n_laws);
  for (int i = 0; i < n_affairs; ++i) {
    affairs.push_back(out.entities.intern(format_id("task", i)));
  }
  for (int l = 0; l < n_laws; ++l) {
    laws.push_back(out.entities.intern(format_id("law", l)));
  }
  for (int l = 0; l < n_laws; ++l) {
    for (int p = 0; p < provisions_per_law; ++p) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "prov_%03d_%03d", l, p);
      provisions_of[l].push_back(out.entities.intern(buf));
    }
  }
  for (int i = 0; i < n_affairs; ++i) {
    rights.push_back(out.entities.intern(format_id("right", i)));
  }

  const RelationId base_entry_is = out.relations.intern(kBaseEntryIs);
  const RelationId right_is = out.relations.intern(kRightIs);
  const RelationId base_law_is = out.relations.intern(kBaseLawIs);
  const RelationId belongs_to = out.relations.intern(kBelongsTo);

  std::vector<std::vector<std::uint64_t>> words_of(out.entities.size());
  for (std::int32_t e = 0; e < out.entities.size(); ++e) {
    for (int k = 0; k < kNoiseWordsPerEntity; ++k) {
      words_of[e].push_back(rng.below(kWordPool));
    }
  }

  std::vector<Triple> triples;
  for (int i = 0; i < n_affairs; ++i) {
    const EntityId affair = affairs[i];
    const auto n_linked =
        1 + rng.below(static_cast<std::uint64_t>(std::min(3, n_laws)));
    std::vector<std::uint64_t> chosen =
        rng.sample_without_replacement(n_laws, n_linked);
    std::sort(chosen.begin(), chosen.end());
    for (std::uint64_t l : chosen) {
      triples.push_back(Triple{affair, base_law_is, laws[l]});
    }

    std::vector<EntityId> candidates;
    for (std::uint64_t l : chosen) {
      candidates.insert(candidates.end(), provisions_of[l].begin(),
                        provisions_of[l].end());
    }
    std::vector<EntityId> linked;
    for (EntityId p : candidates) {
      if (rng.uniform01() < kProvisionLinkProb) linked.push_back(p);
    }
    if (linked.empty()) {
      linked.push_back(candidates[rng.below(candidates.size())]);
    }
    for (EntityId p : linked) {
      triples.push_back(Triple{affair, base_entry_is, p});
      for (int k = 0; k < kWordsPerLink; ++k) {
        std::uint64_t w = rng.below(kWordPool);
        words_of[affair].push_back(w);
        words_of[p].push_back(w);
      }
    }

    triples.push_back(Triple{affair, right_is, rights[i]});
  }
  for (int l = 0; l < n_laws; ++l) {
    for (EntityId p : provisions_of[l]) {
      triples.push_back(Triple{p, belongs_to, laws[l]});
    }
  }

  out.kg = KnowledgeGraph::build(out.entities.size(), out.relations.size(),
                                 std::move(triples));
  validate_schema(out.kg);

  for (std::int32_t e = 0; e < out.entities.size(); ++e) {
    std::string text;
    for (std::uint64_t w : words_of[e]) {
      if (!text.empty()) text += ' ';
      text += word(w);
    }
    out.texts.emplace(e, std::move(text));
  }
  return out;
}

}  // namespace tgr
