#include "tgr/params.hpp"

namespace tgr {

std::vector<ParamView> mlp_views(MlpParams& p, const std::string& prefix) {
  return {view(prefix + ".W", p.W), view(prefix + ".b", p.b)};
}

std::vector<ParamView> relation_views(RelationEmbeddings& r) {
  return {view("rel.forward", r.forward), view("rel.inverse", r.inverse)};
}

std::vector<ParamView> stack_views(LayerStack& s) {
  std::vector<ParamView> out;
  for (std::size_t l = 0; l < s.gat_layers.size(); ++l) {
    for (std::size_t h = 0; h < s.gat_layers[l].heads.size(); ++h) {
      std::string base =
          "stack.l" + std::to_string(l) + ".h" + std::to_string(h);
      out.push_back(view(base + ".W", s.gat_layers[l].heads[h].W));
      out.push_back(view(base + ".a", s.gat_layers[l].heads[h].a));
    }
  }
  for (std::size_t l = 0; l < s.rgcn_layers.size(); ++l) {
    std::string base = "stack.l" + std::to_string(l);
    for (std::size_t k = 0; k < s.rgcn_layers[l].w_rel.size(); ++k) {
      out.push_back(
          view(base + ".rel" + std::to_string(k), s.rgcn_layers[l].w_rel[k]));
    }
    out.push_back(view(base + ".self", s.rgcn_layers[l].w_self));
  }
  return out;
}

Optimizer::Optimizer(OptimizerConfig config,
                     const std::vector<ParamView>& params)
    : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const ParamView& p : params) {
    m_.push_back(Vector::Zero(p.size));
    v_.push_back(Vector::Zero(p.size));
  }
}

void Optimizer::step(const std::vector<ParamView>& params,
                     const std::vector<ParamView>& grads, double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ConfigError("optimizer slot mismatch");
  }
  ++step_;
  if (config_.variant == OptimizerVariant::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      Eigen::Map<Vector> p(params[i].data, params[i].size);
      Eigen::Map<const Vector> g(grads[i].data, grads[i].size);
      p -= lr * g;
    }
    return;
  }
  const double bc1 = 1.0 - std::pow(config_.beta1, double(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, double(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::Map<Vector> p(params[i].data, params[i].size);
    Eigen::Map<const Vector> g(grads[i].data, grads[i].size);
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m_[i].array() / bc1) /
                 ((v_[i].array() / bc2).sqrt() + config_.eps);
  }
}

void Optimizer::restore(std::int64_t step, std::vector<Vector> m,
                        std::vector<Vector> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw DataError("optimizer state does not match parameter slots");
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m_[i].size() || v[i].size() != v_[i].size()) {
      throw DataError("optimizer state tensor shape mismatch");
    }
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace tgr
