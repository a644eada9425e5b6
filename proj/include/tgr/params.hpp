#pragma once

#include <string>
#include <vector>

#include "tgr/common.hpp"
#include "tgr/gnn.hpp"
#include "tgr/mlp.hpp"
#include "tgr/scoring.hpp"

namespace tgr {

/// Flat view over one named parameter tensor (row-major storage).
struct ParamView {
  std::string name;
  double* data = nullptr;
  Eigen::Index size = 0;
};

inline ParamView view(const std::string& name, Matrix& m) {
  return ParamView{name, m.data(), m.size()};
}
inline ParamView view(const std::string& name, EmbeddingTable& m) {
  return ParamView{name, m.data(), m.size()};
}
inline ParamView view(const std::string& name, Vector& v) {
  return ParamView{name, v.data(), v.size()};
}

std::vector<ParamView> mlp_views(MlpParams& p, const std::string& prefix);
std::vector<ParamView> relation_views(RelationEmbeddings& r);
std::vector<ParamView> stack_views(LayerStack& s);

inline void append_views(std::vector<ParamView>& into,
                         std::vector<ParamView> more) {
  for (ParamView& v : more) into.push_back(std::move(v));
}

enum class OptimizerVariant { Adam, Sgd };

struct OptimizerConfig {
  OptimizerVariant variant = OptimizerVariant::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam (or plain SGD) over a fixed list of parameter slots. Slot shapes are
/// pinned at construction; state can round-trip through checkpoints.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, const std::vector<ParamView>& params);

  /// One update with the given learning rate; `grads` must align with the
  /// construction-time slots.
  void step(const std::vector<ParamView>& params,
            const std::vector<ParamView>& grads, double lr);

  std::int64_t step_count() const { return step_; }
  const std::vector<Vector>& moment1() const { return m_; }
  const std::vector<Vector>& moment2() const { return v_; }
  void restore(std::int64_t step, std::vector<Vector> m, std::vector<Vector> v);

 private:
  OptimizerConfig config_;
  std::int64_t step_ = 0;
  std::vector<Vector> m_, v_;
};

}  // namespace tgr
