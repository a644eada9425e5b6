#include "tgr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tgr/io.hpp"

namespace tgr {

std::string to_string(Protocol p) {
  return p == Protocol::Raw ? "raw" : "filtered";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "raw") return Protocol::Raw;
  if (s == "filtered") return Protocol::Filtered;
  throw ConfigError("unknown protocol `" + s + "`");
}

std::string to_string(Side s) {
  switch (s) {
    case Side::Head: return "head";
    case Side::Tail: return "tail";
    case Side::Both: return "both";
  }
  return "?";
}

Side side_from_string(const std::string& s) {
  if (s == "head") return Side::Head;
  if (s == "tail") return Side::Tail;
  if (s == "both") return Side::Both;
  throw ConfigError("unknown side `" + s + "`");
}

Vector score_all_candidates(const EmbeddingTable& entity_table,
                            const RelationEmbeddings& relations,
                            const ScoreFnSpec& spec, const Triple& triple,
                            Side side) {
  if (side == Side::Both) {
    throw ConfigError("score_all_candidates requires side head or tail");
  }
  const auto n = entity_table.rows();
  if (triple.head < 0 || triple.head >= n || triple.tail < 0 ||
      triple.tail >= n || triple.relation < 0 ||
      triple.relation >= relations.forward.rows()) {
    throw DataError("triple ids are out of vocabulary");
  }
  Vector v_r = relations.forward.row(triple.relation);
  Vector v_r_inv = relations.inverse.row(triple.relation);
  Vector fixed = side == Side::Head
                     ? Vector(entity_table.row(triple.tail))
                     : Vector(entity_table.row(triple.head));
  Vector scores(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vector cand = entity_table.row(c);
    scores[c] = side == Side::Head
                    ? score_triple_vectors(spec, cand, v_r, v_r_inv, fixed)
                    : score_triple_vectors(spec, fixed, v_r, v_r_inv, cand);
  }
  return scores;
}

int rank_from_scores(const Vector& scores, Eigen::Index true_candidate,
                     Polarity polarity, const std::vector<char>* keep) {
  const double s_true = scores[true_candidate];
  std::int64_t better = 0, ties = 0;
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    if (keep && !(*keep)[static_cast<std::size_t>(c)]) continue;
    const double s = scores[c];
    if (polarity == Polarity::LowerBetter ? s < s_true : s > s_true) {
      ++better;
    } else if (s == s_true) {
      ++ties;
    }
  }
  const double rank = static_cast<double>(better) +
                      (static_cast<double>(ties) + 1.0) / 2.0;
  return static_cast<int>(std::floor(rank + 0.5));
}

int rank_triple(const EmbeddingTable& entity_table,
                const RelationEmbeddings& relations, const ScoreFnSpec& spec,
                const Triple& triple, Side side, Protocol protocol,
                const TripleSet& known) {
  Vector scores = score_all_candidates(entity_table, relations, spec, triple, side);
  const Eigen::Index true_candidate =
      side == Side::Head ? triple.head : triple.tail;
  std::vector<char> keep;
  const std::vector<char>* keep_ptr = nullptr;
  if (protocol == Protocol::Filtered) {
    keep.assign(static_cast<std::size_t>(scores.size()), 1);
    for (Eigen::Index c = 0; c < scores.size(); ++c) {
      if (c == true_candidate) continue;
      Triple corrupted = triple;
      if (side == Side::Head) {
        corrupted.head = static_cast<EntityId>(c);
      } else {
        corrupted.tail = static_cast<EntityId>(c);
      }
      if (known.contains(corrupted)) keep[static_cast<std::size_t>(c)] = 0;
    }
    keep_ptr = &keep;
  }
  return rank_from_scores(scores, true_candidate, spec.polarity(), keep_ptr);
}

namespace {

MetricBlock metrics_from_ranks(const std::vector<int>& ranks) {
  MetricBlock m;
  m.n_queries = ranks.size();
  if (ranks.empty()) return m;
  double sum_rank = 0.0, sum_inv = 0.0;
  std::size_t h1 = 0, h3 = 0, h10 = 0;
  for (int r : ranks) {
    sum_rank += static_cast<double>(r);
    sum_inv += 1.0 / static_cast<double>(r);
    if (r <= 1) ++h1;
    if (r <= 3) ++h3;
    if (r <= 10) ++h10;
  }
  const auto n = static_cast<double>(ranks.size());
  m.mr = sum_rank / n;
  m.mrr = sum_inv / n;
  m.hit1 = static_cast<double>(h1) / n;
  m.hit3 = static_cast<double>(h3) / n;
  m.hit10 = static_cast<double>(h10) / n;
  return m;
}

MetricBlock average_blocks(const MetricBlock& a, const MetricBlock& b) {
  MetricBlock m;
  m.mr = (a.mr + b.mr) / 2.0;
  m.mrr = (a.mrr + b.mrr) / 2.0;
  m.hit1 = (a.hit1 + b.hit1) / 2.0;
  m.hit3 = (a.hit3 + b.hit3) / 2.0;
  m.hit10 = (a.hit10 + b.hit10) / 2.0;
  m.n_queries = a.n_queries;
  return m;
}

RankingReport evaluate_one_side(const std::vector<Triple>& queries,
                                const EmbeddingTable& entity_table,
                                const RelationEmbeddings& relations,
                                const ScoreFnSpec& spec, Protocol protocol,
                                Side side, const TripleSet& known) {
  std::vector<int> all_ranks;
  std::map<RelationId, std::vector<int>> by_relation;
  all_ranks.reserve(queries.size());
  for (const Triple& q : queries) {
    int r = rank_triple(entity_table, relations, spec, q, side, protocol, known);
    all_ranks.push_back(r);
    by_relation[q.relation].push_back(r);
  }
  RankingReport report;
  report.protocol = protocol;
  report.side = side;
  report.overall = metrics_from_ranks(all_ranks);
  for (const auto& [rel, ranks] : by_relation) {
    report.per_relation[rel] = metrics_from_ranks(ranks);
  }
  return report;
}

}  // namespace

RankingReport evaluate(const std::vector<Triple>& queries,
                       const EmbeddingTable& entity_table,
                       const RelationEmbeddings& relations,
                       const ScoreFnSpec& spec, Protocol protocol, Side side,
                       const TripleSet& known) {
  if (queries.empty()) throw DataError("evaluate: empty query set");
  if (side != Side::Both) {
    return evaluate_one_side(queries, entity_table, relations, spec, protocol,
                             side, known);
  }
  RankingReport head = evaluate_one_side(queries, entity_table, relations,
                                         spec, protocol, Side::Head, known);
  RankingReport tail = evaluate_one_side(queries, entity_table, relations,
                                         spec, protocol, Side::Tail, known);
  RankingReport report;
  report.protocol = protocol;
  report.side = Side::Both;
  report.overall = average_blocks(head.overall, tail.overall);
  for (const auto& [rel, block] : head.per_relation) {
    report.per_relation[rel] = average_blocks(block, tail.per_relation.at(rel));
  }
  return report;
}

std::vector<Prediction> predict_topk(const EmbeddingTable& entity_table,
                                     const RelationEmbeddings& relations,
                                     const ScoreFnSpec& spec,
                                     EntityId query_entity,
                                     RelationId relation, Side direction,
                                     int k, bool exclude_known,
                                     const TripleSet& known) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (direction == Side::Both) {
    throw ConfigError("predict_topk requires direction head or tail");
  }
  Triple probe;
  probe.relation = relation;
  if (direction == Side::Tail) {
    probe.head = query_entity;
    probe.tail = 0;
  } else {
    probe.tail = query_entity;
    probe.head = 0;
  }
  Vector scores =
      score_all_candidates(entity_table, relations, spec, probe, direction);
  const Polarity polarity = spec.polarity();

  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    if (exclude_known) {
      Triple cand = probe;
      if (direction == Side::Tail) {
        cand.tail = static_cast<EntityId>(c);
      } else {
        cand.head = static_cast<EntityId>(c);
      }
      if (known.contains(cand)) continue;
    }
    out.push_back(Prediction{static_cast<EntityId>(c), scores[c]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](const Prediction& a, const Prediction& b) {
                     if (a.score != b.score) {
                       return polarity == Polarity::LowerBetter
                                  ? a.score < b.score
                                  : a.score > b.score;
                     }
                     return a.entity < b.entity;
                   });
  if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
  return out;
}

void export_embedding_table(const std::string& path,
                            const EmbeddingTable& table,
                            const SymbolTable& entities) {
  if (table.rows() != entities.size()) {
    throw DataError("embedding table rows do not match the entity vocabulary");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    out << entities.name(static_cast<std::int32_t>(i));
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", table(i, j));
      out << '\t' << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

EmbeddingTable load_embedding_table(const std::string& path,
                                    const SymbolTable& entities) {
  PrecomputedEmbeddings raw = load_precomputed_embeddings(path);
  if (raw.rows.rows() != entities.size()) {
    throw DataError("embedding file row count does not match the vocabulary");
  }
  EmbeddingTable table(entities.size(), raw.rows.cols());
  for (std::int32_t e = 0; e < entities.size(); ++e) {
    auto it = raw.row_of.find(entities.name(e));
    if (it == raw.row_of.end()) {
      throw DataError("embedding file is missing entity `" + entities.name(e) +
                      "`");
    }
    table.row(e) = raw.rows.row(static_cast<Eigen::Index>(it->second));
  }
  return table;
}

namespace {

nlohmann::json block_to_json(const MetricBlock& m) {
  return {{"mr", m.mr},       {"mrr", m.mrr},   {"hit1", m.hit1},
          {"hit3", m.hit3},   {"hit10", m.hit10}, {"n_queries", m.n_queries}};
}

}  // namespace

nlohmann::json report_to_json(const RankingReport& report,
                              const SymbolTable& relations) {
  nlohmann::json j;
  j["protocol"] = to_string(report.protocol);
  j["side"] = to_string(report.side);
  j["mr"] = report.overall.mr;
  j["mrr"] = report.overall.mrr;
  j["hit1"] = report.overall.hit1;
  j["hit3"] = report.overall.hit3;
  j["hit10"] = report.overall.hit10;
  j["n_queries"] = report.overall.n_queries;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [rel, block] : report.per_relation) {
    per[relations.name(rel)] = block_to_json(block);
  }
  j["per_relation"] = per;
  return j;
}

std::string report_to_tsv_row(const RankingReport& report,
                              const std::string& label) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s\t%.3f\t%.3f\t%.3f\t%.3f\t%.3f", label.c_str(),
                report.overall.mr, report.overall.mrr, report.overall.hit1,
                report.overall.hit3, report.overall.hit10);
  return buf;
}

}  // namespace tgr
