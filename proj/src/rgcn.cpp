#include "tgr/gnn.hpp"

namespace tgr {

Vector rgcn_update(const RgcnParams& params, const Vector& v_i,
                   const std::map<RelDir, std::vector<Vector>>& neighbors,
                   Nonlinearity sigma) {
  const Eigen::Index d = params.w_self.rows();
  if (params.w_self.cols() != d || v_i.size() != d) {
    throw DataError("R-GCN dimensions must be square and match the input");
  }
  Vector acc = Vector::Zero(d);
  for (const auto& [rel_dir, list] : neighbors) {
    if (list.empty()) continue;
    const Matrix& w = params.relation_matrix(rel_dir.first, rel_dir.second);
    Vector s = Vector::Zero(d);
    for (const Vector& v_m : list) {
      if (v_m.size() != d) {
        throw DataError("R-GCN neighbor dimension mismatch");
      }
      s += v_m;
    }
    acc += (w * s) / static_cast<double>(list.size());
  }
  acc += params.w_self * v_i;
  for (Eigen::Index k = 0; k < d; ++k) {
    acc[k] = apply_nonlinearity(sigma, acc[k]);
  }
  return acc;
}

}  // namespace tgr
