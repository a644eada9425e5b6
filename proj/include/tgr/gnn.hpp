#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tgr/common.hpp"
#include "tgr/graph.hpp"
#include "tgr/rng.hpp"

namespace tgr {

enum class Nonlinearity { Relu, Identity };

inline double apply_nonlinearity(Nonlinearity s, double x) {
  return s == Nonlinearity::Relu ? (x > 0.0 ? x : 0.0) : x;
}

// ---------------------------------------------------------------------------
// GAT
// ---------------------------------------------------------------------------

/// One attention head. `a` has size 2*d_out; its first half attends to the
/// mapped center vector and its second half to the mapped neighbor.
struct GatParams {
  Matrix W;        // d_out x d_in
  Vector a;        // 2 * d_out
  double leaky_slope = 0.2;
};

/// softmax_j(LeakyReLU(a . [W v_i || W v_j])) over the neighbor list.
/// The list must be nonempty and is expected to carry the self vector.
Vector gat_attention(const GatParams& params, const Vector& v_i,
                     const std::vector<Vector>& neighbors);

/// sigma(sum_j alpha_ij W v_j) with alpha from gat_attention.
Vector gat_aggregate(const GatParams& params, const Vector& v_i,
                     const std::vector<Vector>& neighbors, Nonlinearity sigma);

// ---------------------------------------------------------------------------
// R-GCN
// ---------------------------------------------------------------------------

/// Direction-tagged relation key: (relation id, inverse?). Forward sorts
/// before inverse, so map iteration order matches the batched pass.
using RelDir = std::pair<RelationId, bool>;

struct RgcnParams {
  std::vector<Matrix> w_rel;  // 2 * n_relations, index 2*rel + inverse
  Matrix w_self;              // d x d

  const Matrix& relation_matrix(RelationId rel, bool inverse) const {
    return w_rel.at(2 * static_cast<std::size_t>(rel) + (inverse ? 1 : 0));
  }
};

/// sigma( sum_{(r,dir)} (1/|N|) W_{r,dir} sum_{m in N} v_m + W_0 v_i ).
/// Empty neighborhoods contribute nothing, leaving the self term.
Vector rgcn_update(const RgcnParams& params, const Vector& v_i,
                   const std::map<RelDir, std::vector<Vector>>& neighbors,
                   Nonlinearity sigma);

/// text_feature + gnn_output; throws DataError on dimension mismatch.
Vector residual_combine(const Vector& text_feature, const Vector& gnn_output);

// ---------------------------------------------------------------------------
// Layer stack over a graph
// ---------------------------------------------------------------------------

enum class GnnVariant { Gat, Rgcn, None };

struct GatLayer {
  std::vector<GatParams> heads;  // outputs are averaged across heads
};

struct LayerStack {
  GnnVariant variant = GnnVariant::None;
  std::vector<GatLayer> gat_layers;
  std::vector<RgcnParams> rgcn_layers;

  int depth() const {
    return variant == GnnVariant::Gat    ? static_cast<int>(gat_layers.size())
           : variant == GnnVariant::Rgcn ? static_cast<int>(rgcn_layers.size())
                                         : 0;
  }

  /// Inter-layer nonlinearity is ReLU; the final layer is linear so the
  /// residual sum can move in any direction.
  Nonlinearity nonlinearity_at(int layer) const {
    return layer + 1 == depth() ? Nonlinearity::Identity : Nonlinearity::Relu;
  }

  /// Xavier-uniform parameters (or all-zero when `zero_init`, which makes the
  /// stack output exactly zero and the residual a passthrough).
  static LayerStack init(GnnVariant variant, int depth, int heads,
                         Eigen::Index d, std::int32_t n_relations,
                         double leaky_slope, bool zero_init, Rng& rng);

  LayerStack zeros_like() const;
};

/// Neighborhoods used by the stack, prebuilt from the graph.
///   - GAT is relation-blind and undirected: for node i the list is i itself
///     first, then the distinct neighbors in ascending id order.
///   - R-GCN buckets direction-tagged neighbors per node, buckets ordered by
///     (relation, forward-before-inverse), neighbors in adjacency order.
struct GnnGraph {
  std::int32_t n_entities = 0;
  std::int32_t n_relations = 0;
  // GAT CSR
  std::vector<std::int32_t> gat_offsets;  // n+1
  std::vector<std::int32_t> gat_nbrs;
  // R-GCN buckets
  struct Bucket {
    RelationId relation;
    bool inverse;
    std::int32_t begin, end;  // span into rgcn_nbrs
  };
  std::vector<std::vector<Bucket>> rgcn_buckets;  // per node
  std::vector<std::int32_t> rgcn_nbrs;
};

GnnGraph build_gnn_graph(const KnowledgeGraph& kg);

/// Per-layer intermediate state kept for backprop.
struct StackCache {
  std::vector<EmbeddingTable> inputs;  // per layer, n x d
  // GAT, indexed [layer][head]
  std::vector<std::vector<EmbeddingTable>> z;       // mapped vectors
  std::vector<std::vector<Vector>> dot_center;      // a_head . z per node
  std::vector<std::vector<Vector>> dot_neighbor;    // a_tail . z per node
  std::vector<std::vector<Vector>> alpha;           // per edge
  std::vector<std::vector<Vector>> logit_pre;       // per edge, before leaky
  std::vector<EmbeddingTable> pre;                  // pre-sigma, per layer
  EmbeddingTable stack_output;                      // before the residual
};

/// Runs the stack over every entity and applies the residual rowwise:
/// returns feature_table + stack(feature_table). Deterministic; exactly
/// matches per-node recomputation with the free functions above.
EmbeddingTable forward_all(const LayerStack& stack,
                           const EmbeddingTable& feature_table,
                           const KnowledgeGraph& kg);

EmbeddingTable forward_all_cached(const LayerStack& stack,
                                  const EmbeddingTable& feature_table,
                                  const GnnGraph& graph, StackCache& cache);

/// Accumulates parameter gradients (and optionally feature-table gradients,
/// residual path included) given dL/d(output of forward_all).
void backward_all(const LayerStack& stack, const GnnGraph& graph,
                  const StackCache& cache, const EmbeddingTable& d_output,
                  LayerStack& grads, EmbeddingTable* d_features);

}  // namespace tgr
