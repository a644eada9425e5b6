#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tgr/graph.hpp"
#include "tgr/scoring.hpp"
#include "tgr/symbols.hpp"

#include <json.hpp>

namespace tgr {

enum class Protocol { Raw, Filtered };
enum class Side { Head, Tail, Both };

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);
std::string to_string(Side s);
Side side_from_string(const std::string& s);

struct MetricBlock {
  double mr = 0.0;
  double mrr = 0.0;
  double hit1 = 0.0;
  double hit3 = 0.0;
  double hit10 = 0.0;
  std::size_t n_queries = 0;
};

struct RankingReport {
  Protocol protocol = Protocol::Filtered;
  Side side = Side::Both;
  MetricBlock overall;
  std::map<RelationId, MetricBlock> per_relation;
};

/// Scores every candidate replacement of the given side (head or tail) of the
/// triple. Entry c is the score with entity c substituted in.
Vector score_all_candidates(const EmbeddingTable& entity_table,
                            const RelationEmbeddings& relations,
                            const ScoreFnSpec& spec, const Triple& triple,
                            Side side);

/// Rank with mean-tie handling from a dense candidate score vector:
/// rank = (#strictly better) + (#ties + 1)/2, rounded half-up to an integer.
/// `keep` (optional) marks candidates that participate; the true candidate
/// must be kept.
int rank_from_scores(const Vector& scores, Eigen::Index true_candidate,
                     Polarity polarity, const std::vector<char>* keep);

/// Rank of the true triple against all candidate replacements on one side.
/// The filtered protocol removes candidates that form a different known-true
/// triple. Side must be Head or Tail.
int rank_triple(const EmbeddingTable& entity_table,
                const RelationEmbeddings& relations, const ScoreFnSpec& spec,
                const Triple& triple, Side side, Protocol protocol,
                const TripleSet& known);

/// MR / MRR / Hit@{1,3,10} with a per-relation breakdown. Side::Both averages
/// the head-side and tail-side metrics. Throws DataError on an empty query
/// set.
RankingReport evaluate(const std::vector<Triple>& queries,
                       const EmbeddingTable& entity_table,
                       const RelationEmbeddings& relations,
                       const ScoreFnSpec& spec, Protocol protocol, Side side,
                       const TripleSet& known);

struct Prediction {
  EntityId entity = 0;
  double score = 0.0;
};

/// Top-k completions of (entity, relation, ?) (direction Tail) or
/// (?, relation, entity) (direction Head), best first; ties break on entity
/// id. `exclude_known` drops candidates already linked in `known`.
std::vector<Prediction> predict_topk(const EmbeddingTable& entity_table,
                                     const RelationEmbeddings& relations,
                                     const ScoreFnSpec& spec,
                                     EntityId query_entity,
                                     RelationId relation, Side direction,
                                     int k, bool exclude_known,
                                     const TripleSet& known);

/// TSV `name\tv1...vd` with round-trip-exact doubles.
void export_embedding_table(const std::string& path,
                            const EmbeddingTable& table,
                            const SymbolTable& entities);
EmbeddingTable load_embedding_table(const std::string& path,
                                    const SymbolTable& entities);

nlohmann::json report_to_json(const RankingReport& report,
                              const SymbolTable& relations);
/// One metrics row: label, MR, MRR, Hit@1, Hit@3, Hit@10.
std::string report_to_tsv_row(const RankingReport& report,
                              const std::string& label);

}  // namespace tgr
