#include <algorithm>

#include "tgr/gnn.hpp"

namespace tgr {

namespace detail {
double leaky_relu(double x, double slope);
void softmax_inplace(Vector& x);
}  // namespace detail

GnnGraph build_gnn_graph(const KnowledgeGraph& kg) {
  GnnGraph g;
  g.n_entities = kg.n_entities;
  g.n_relations = kg.n_relations;

  g.gat_offsets.assign(kg.n_entities + 1, 0);
  g.gat_nbrs.clear();
  g.rgcn_buckets.assign(kg.n_entities, {});
  g.rgcn_nbrs.clear();

  std::vector<EntityId> scratch;
  for (std::int32_t i = 0; i < kg.n_entities; ++i) {
    // GAT: self first, then distinct neighbors ascending.
    scratch.clear();
    for (const Edge& e : kg.adjacency[i]) scratch.push_back(e.neighbor);
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    g.gat_nbrs.push_back(i);
    for (EntityId n : scratch) {
      if (n != i) g.gat_nbrs.push_back(n);
    }
    g.gat_offsets[i + 1] = static_cast<std::int32_t>(g.gat_nbrs.size());

    // R-GCN: buckets ordered by (relation, forward-before-inverse),
    // neighbors in adjacency (triple scan) order.
    for (RelationId r = 0; r < kg.n_relations; ++r) {
      for (int dir = 0; dir < 2; ++dir) {
        const bool inverse = dir == 1;
        const auto begin = static_cast<std::int32_t>(g.rgcn_nbrs.size());
        for (const Edge& e : kg.adjacency[i]) {
          if (e.relation == r && e.inverse == inverse) {
            g.rgcn_nbrs.push_back(e.neighbor);
          }
        }
        const auto end = static_cast<std::int32_t>(g.rgcn_nbrs.size());
        if (end > begin) {
          g.rgcn_buckets[i].push_back(GnnGraph::Bucket{r, inverse, begin, end});
        }
      }
    }
  }
  return g;
}

LayerStack LayerStack::init(GnnVariant variant, int depth, int heads,
                            Eigen::Index d, std::int32_t n_relations,
                            double leaky_slope, bool zero_init, Rng& rng) {
  if (variant != GnnVariant::None && depth < 1) {
    throw ConfigError("GNN depth must be >= 1");
  }
  if (heads < 1) throw ConfigError("GAT head count must be >= 1");
  LayerStack stack;
  stack.variant = variant;
  auto uniform_fill = [&](Matrix& m, double bound) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(i, j) = zero_init ? 0.0 : rng.uniform(-bound, bound);
      }
    }
  };
  if (variant == GnnVariant::Gat) {
    const double w_bound = std::sqrt(6.0 / static_cast<double>(2 * d));
    const double a_bound = std::sqrt(6.0 / static_cast<double>(2 * d + 1));
    for (int l = 0; l < depth; ++l) {
      GatLayer layer;
      for (int h = 0; h < heads; ++h) {
        GatParams p;
        p.W.resize(d, d);
        uniform_fill(p.W, w_bound);
        p.a.resize(2 * d);
        for (Eigen::Index k = 0; k < p.a.size(); ++k) {
          p.a[k] = zero_init ? 0.0 : rng.uniform(-a_bound, a_bound);
        }
        p.leaky_slope = leaky_slope;
        layer.heads.push_back(std::move(p));
      }
      stack.gat_layers.push_back(std::move(layer));
    }
  } else if (variant == GnnVariant::Rgcn) {
    const double bound = std::sqrt(6.0 / static_cast<double>(2 * d));
    for (int l = 0; l < depth; ++l) {
      RgcnParams p;
      p.w_rel.resize(2 * static_cast<std::size_t>(n_relations));
      for (auto& w : p.w_rel) {
        w.resize(d, d);
        uniform_fill(w, bound);
      }
      p.w_self.resize(d, d);
      uniform_fill(p.w_self, bound);
      stack.rgcn_layers.push_back(std::move(p));
    }
  }
  return stack;
}

LayerStack LayerStack::zeros_like() const {
  LayerStack out;
  out.variant = variant;
  for (const GatLayer& layer : gat_layers) {
    GatLayer zl;
    for (const GatParams& h : layer.heads) {
      zl.heads.push_back(GatParams{Matrix::Zero(h.W.rows(), h.W.cols()),
                                   Vector::Zero(h.a.size()), h.leaky_slope});
    }
    out.gat_layers.push_back(std::move(zl));
  }
  for (const RgcnParams& layer : rgcn_layers) {
    RgcnParams zp;
    for (const Matrix& w : layer.w_rel) {
      zp.w_rel.push_back(Matrix::Zero(w.rows(), w.cols()));
    }
    zp.w_self = Matrix::Zero(layer.w_self.rows(), layer.w_self.cols());
    out.rgcn_layers.push_back(std::move(zp));
  }
  return out;
}

namespace {

void gat_layer_forward(const GatLayer& layer, const EmbeddingTable& h_in,
                       const GnnGraph& g, Nonlinearity sigma, int layer_idx,
                       StackCache& cache, EmbeddingTable& h_out) {
  const auto n = h_in.rows();
  const Eigen::Index d = h_in.cols();
  const auto n_heads = static_cast<double>(layer.heads.size());
  EmbeddingTable mean_pre = EmbeddingTable::Zero(n, d);
  for (std::size_t hd = 0; hd < layer.heads.size(); ++hd) {
    const GatParams& p = layer.heads[hd];
    EmbeddingTable z(n, d);
    Vector dot_center(n), dot_neighbor(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector h_i = h_in.row(i);
      Vector z_i = p.W * h_i;
      dot_center[i] = p.a.head(d).dot(z_i);
      dot_neighbor[i] = p.a.tail(d).dot(z_i);
      z.row(i) = z_i.transpose();
    }
    Vector alpha(g.gat_nbrs.size());
    Vector logit_pre(g.gat_nbrs.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::int32_t begin = g.gat_offsets[i];
      const std::int32_t end = g.gat_offsets[i + 1];
      Vector logits(end - begin);
      for (std::int32_t e = begin; e < end; ++e) {
        const double s = dot_center[i] + dot_neighbor[g.gat_nbrs[e]];
        logit_pre[e] = s;
        logits[e - begin] = detail::leaky_relu(s, p.leaky_slope);
      }
      detail::softmax_inplace(logits);
      Vector u = Vector::Zero(d);
      for (std::int32_t e = begin; e < end; ++e) {
        alpha[e] = logits[e - begin];
        u += alpha[e] * z.row(g.gat_nbrs[e]).transpose();
      }
      mean_pre.row(i) += u.transpose();
    }
    cache.z[layer_idx].push_back(std::move(z));
    cache.dot_center[layer_idx].push_back(std::move(dot_center));
    cache.dot_neighbor[layer_idx].push_back(std::move(dot_neighbor));
    cache.alpha[layer_idx].push_back(std::move(alpha));
    cache.logit_pre[layer_idx].push_back(std::move(logit_pre));
  }
  mean_pre /= n_heads;
  cache.pre[layer_idx] = mean_pre;
  h_out.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      h_out(i, k) = apply_nonlinearity(sigma, mean_pre(i, k));
    }
  }
}

void rgcn_layer_forward(const RgcnParams& p, const EmbeddingTable& h_in,
                        const GnnGraph& g, Nonlinearity sigma, int layer_idx,
                        StackCache& cache, EmbeddingTable& h_out) {
  const auto n = h_in.rows();
  const Eigen::Index d = h_in.cols();
  EmbeddingTable pre(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector acc = Vector::Zero(d);
    for (const GnnGraph::Bucket& b : g.rgcn_buckets[i]) {
      Vector s = Vector::Zero(d);
      for (std::int32_t e = b.begin; e < b.end; ++e) {
        s += h_in.row(g.rgcn_nbrs[e]).transpose();
      }
      const Matrix& w = p.relation_matrix(b.relation, b.inverse);
      acc += (w * s) / static_cast<double>(b.end - b.begin);
    }
    Vector h_i = h_in.row(i);
    acc += p.w_self * h_i;
    pre.row(i) = acc.transpose();
  }
  cache.pre[layer_idx] = pre;
  h_out.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      h_out(i, k) = apply_nonlinearity(sigma, pre(i, k));
    }
  }
}

}  // namespace

EmbeddingTable forward_all_cached(const LayerStack& stack,
                                  const EmbeddingTable& feature_table,
                                  const GnnGraph& graph, StackCache& cache) {
  if (feature_table.rows() != graph.n_entities) {
    throw DataError("feature table row count does not match the graph");
  }
  const int depth = stack.depth();
  cache = StackCache{};
  cache.inputs.resize(depth);
  cache.z.resize(depth);
  cache.dot_center.resize(depth);
  cache.dot_neighbor.resize(depth);
  cache.alpha.resize(depth);
  cache.logit_pre.resize(depth);
  cache.pre.resize(depth);

  if (stack.variant == GnnVariant::None) {
    cache.stack_output = EmbeddingTable::Zero(feature_table.rows(),
                                              feature_table.cols());
    return feature_table;
  }

  EmbeddingTable h = feature_table;
  for (int l = 0; l < depth; ++l) {
    cache.inputs[l] = h;
    EmbeddingTable h_next;
    if (stack.variant == GnnVariant::Gat) {
      gat_layer_forward(stack.gat_layers[l], cache.inputs[l], graph,
                        stack.nonlinearity_at(l), l, cache, h_next);
    } else {
      rgcn_layer_forward(stack.rgcn_layers[l], cache.inputs[l], graph,
                         stack.nonlinearity_at(l), l, cache, h_next);
    }
    h = std::move(h_next);
  }
  cache.stack_output = h;
  return feature_table + h;
}

EmbeddingTable forward_all(const LayerStack& stack,
                           const EmbeddingTable& feature_table,
                           const KnowledgeGraph& kg) {
  GnnGraph graph = build_gnn_graph(kg);
  StackCache cache;
  return forward_all_cached(stack, feature_table, graph, cache);
}

namespace {

EmbeddingTable gat_layer_backward(const LayerStack& stack, int l,
                                  const GnnGraph& g, const StackCache& cache,
                                  const EmbeddingTable& d_out,
                                  LayerStack& grads) {
  const GatLayer& layer = stack.gat_layers[l];
  const EmbeddingTable& h_in = cache.inputs[l];
  const EmbeddingTable& pre = cache.pre[l];
  const auto n = h_in.rows();
  const Eigen::Index d = h_in.cols();
  const double n_heads = static_cast<double>(layer.heads.size());
  const Nonlinearity sigma = stack.nonlinearity_at(l);

  EmbeddingTable d_pre = d_out;
  if (sigma == Nonlinearity::Relu) {
    d_pre = (pre.array() > 0.0).select(d_pre, 0.0);
  }

  EmbeddingTable d_h = EmbeddingTable::Zero(n, d);
  for (std::size_t hd = 0; hd < layer.heads.size(); ++hd) {
    const GatParams& p = layer.heads[hd];
    const EmbeddingTable& z = cache.z[l][hd];
    const Vector& alpha = cache.alpha[l][hd];
    const Vector& logit_pre = cache.logit_pre[l][hd];

    EmbeddingTable d_z = EmbeddingTable::Zero(n, d);
    Vector d_center = Vector::Zero(n);
    Vector d_neighbor = Vector::Zero(n);

    for (Eigen::Index i = 0; i < n; ++i) {
      const std::int32_t begin = g.gat_offsets[i];
      const std::int32_t end = g.gat_offsets[i + 1];
      Vector d_u = d_pre.row(i).transpose() / n_heads;
      Vector d_alpha(end - begin);
      double weighted = 0.0;
      for (std::int32_t e = begin; e < end; ++e) {
        d_alpha[e - begin] = d_u.dot(z.row(g.gat_nbrs[e]).transpose());
        weighted += alpha[e] * d_alpha[e - begin];
      }
      for (std::int32_t e = begin; e < end; ++e) {
        const double d_s = alpha[e] * (d_alpha[e - begin] - weighted);
        const double d_logit =
            d_s * (logit_pre[e] > 0.0 ? 1.0 : p.leaky_slope);
        d_center[i] += d_logit;
        d_neighbor[g.gat_nbrs[e]] += d_logit;
        d_z.row(g.gat_nbrs[e]) += alpha[e] * d_u.transpose();
      }
    }

    GatParams& gp = grads.gat_layers[l].heads[hd];
    gp.a.head(d) += z.transpose() * d_center;
    gp.a.tail(d) += z.transpose() * d_neighbor;
    d_z += d_center * p.a.head(d).transpose();
    d_z += d_neighbor * p.a.tail(d).transpose();
    gp.W += d_z.transpose() * h_in;
    d_h += d_z * p.W;
  }
  return d_h;
}

EmbeddingTable rgcn_layer_backward(const LayerStack& stack, int l,
                                   const GnnGraph& g, const StackCache& cache,
                                   const EmbeddingTable& d_out,
                                   LayerStack& grads) {
  const RgcnParams& p = stack.rgcn_layers[l];
  const EmbeddingTable& h_in = cache.inputs[l];
  const EmbeddingTable& pre = cache.pre[l];
  const auto n = h_in.rows();
  const Eigen::Index d = h_in.cols();
  const Nonlinearity sigma = stack.nonlinearity_at(l);

  EmbeddingTable d_pre = d_out;
  if (sigma == Nonlinearity::Relu) {
    d_pre = (pre.array() > 0.0).select(d_pre, 0.0);
  }

  RgcnParams& gp = grads.rgcn_layers[l];
  EmbeddingTable d_h = EmbeddingTable::Zero(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector d_pre_i = d_pre.row(i).transpose();
    gp.w_self += d_pre_i * h_in.row(i);
    d_h.row(i) += (p.w_self.transpose() * d_pre_i).transpose();
    for (const GnnGraph::Bucket& b : g.rgcn_buckets[i]) {
      const double c = static_cast<double>(b.end - b.begin);
      Vector s = Vector::Zero(d);
      for (std::int32_t e = b.begin; e < b.end; ++e) {
        s += h_in.row(g.rgcn_nbrs[e]).transpose();
      }
      Matrix& d_w =
          gp.w_rel[2 * static_cast<std::size_t>(b.relation) + (b.inverse ? 1 : 0)];
      d_w += (d_pre_i * s.transpose()) / c;
      Vector d_s =
          (p.relation_matrix(b.relation, b.inverse).transpose() * d_pre_i) / c;
      for (std::int32_t e = b.begin; e < b.end; ++e) {
        d_h.row(g.rgcn_nbrs[e]) += d_s.transpose();
      }
    }
  }
  return d_h;
}

}  // namespace

void backward_all(const LayerStack& stack, const GnnGraph& graph,
                  const StackCache& cache, const EmbeddingTable& d_output,
                  LayerStack& grads, EmbeddingTable* d_features) {
  if (stack.variant == GnnVariant::None) {
    if (d_features) *d_features += d_output;
    return;
  }
  EmbeddingTable d_h = d_output;  // gradient w.r.t. the stack output
  for (int l = stack.depth() - 1; l >= 0; --l) {
    if (stack.variant == GnnVariant::Gat) {
      d_h = gat_layer_backward(stack, l, graph, cache, d_h, grads);
    } else {
      d_h = rgcn_layer_backward(stack, l, graph, cache, d_h, grads);
    }
  }
  if (d_features) {
    *d_features += d_output;  // residual path
    *d_features += d_h;       // through the stack
  }
}

}  // namespace tgr
