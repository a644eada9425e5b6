#pragma once

#include <string>
#include <unordered_map>

#include "tgr/common.hpp"
#include "tgr/symbols.hpp"
#include "tgr/text.hpp"

namespace tgr {

/// One affine reduction d x raw_dim followed by ReLU.
struct MlpParams {
  Matrix W;
  Vector b;

  static MlpParams zeros(Eigen::Index d, Eigen::Index raw_dim) {
    return MlpParams{Matrix::Zero(d, raw_dim), Vector::Zero(d)};
  }
};

/// ReLU(W m + b). Throws DataError on dimension mismatch.
Vector mlp_reduce(const MlpParams& params, const Vector& m);

/// Forward pass that also exposes the pre-activation for backprop.
Vector mlp_forward(const MlpParams& params, const Vector& m, Vector* pre);

/// Accumulates gradients given dL/d(output). `pre` is the stored
/// pre-activation; the ReLU subgradient at 0 is 0.
void mlp_backward(const MlpParams& params, const Vector& m, const Vector& pre,
                  const Vector& d_out, Matrix& dW, Vector& db,
                  Vector* dm = nullptr);

/// Row e = ReLU(W enc(text_e) + b) for entities with a text record; entities
/// without one share the fallback row.
EmbeddingTable build_feature_table(
    const SymbolTable& entities,
    const std::unordered_map<EntityId, std::string>& texts,
    const TextEncoder& encoder, const MlpParams& params,
    const Vector& fallback);

}  // namespace tgr
