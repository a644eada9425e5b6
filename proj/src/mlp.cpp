#include "tgr/mlp.hpp"

namespace tgr {

Vector mlp_forward(const MlpParams& params, const Vector& m, Vector* pre) {
  if (params.W.cols() != m.size() || params.W.rows() != params.b.size()) {
    throw DataError("mlp_reduce dimension mismatch: W is " +
                    std::to_string(params.W.rows()) + "x" +
                    std::to_string(params.W.cols()) + ", b " +
                    std::to_string(params.b.size()) + ", input " +
                    std::to_string(m.size()));
  }
  Vector z = params.W * m + params.b;
  if (pre) *pre = z;
  return z.cwiseMax(0.0);
}

Vector mlp_reduce(const MlpParams& params, const Vector& m) {
  return mlp_forward(params, m, nullptr);
}

void mlp_backward(const MlpParams& params, const Vector& m, const Vector& pre,
                  const Vector& d_out, Matrix& dW, Vector& db, Vector* dm) {
  Vector delta = (pre.array() > 0.0).select(d_out, 0.0);
  dW.noalias() += delta * m.transpose();
  db += delta;
  if (dm) dm->noalias() += params.W.transpose() * delta;
}

EmbeddingTable build_feature_table(
    const SymbolTable& entities,
    const std::unordered_map<EntityId, std::string>& texts,
    const TextEncoder& encoder, const MlpParams& params,
    const Vector& fallback) {
  const Eigen::Index d = params.W.rows();
  if (fallback.size() != d) {
    throw DataError("fallback vector width does not match feature dimension");
  }
  EmbeddingTable table(entities.size(), d);
  for (std::int32_t e = 0; e < entities.size(); ++e) {
    auto it = texts.find(e);
    if (it == texts.end()) {
      table.row(e) = fallback.transpose();
    } else {
      table.row(e) =
          mlp_reduce(params, encoder.encode(entities.name(e), it->second))
              .transpose();
    }
  }
  return table;
}

}  // namespace tgr
