#include "tgr/gnn.hpp"

namespace tgr {

namespace detail {

double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }

// Max-shifted softmax with explicit loops so every caller accumulates in the
// same order.
void softmax_inplace(Vector& x) {
  double m = x[0];
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    if (x[k] > m) m = x[k];
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x[k] = std::exp(x[k] - m);
    sum += x[k];
  }
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] /= sum;
}

void check_gat_dims(const GatParams& p, Eigen::Index d_in) {
  if (p.W.cols() != d_in) {
    throw DataError("GAT weight matrix width does not match input dimension");
  }
  if (p.a.size() != 2 * p.W.rows()) {
    throw DataError("GAT attention vector must have size 2 * d_out");
  }
}

}  // namespace detail

Vector gat_attention(const GatParams& params, const Vector& v_i,
                     const std::vector<Vector>& neighbors) {
  if (neighbors.empty()) {
    throw DataError("GAT neighborhood is empty (self-loop expected)");
  }
  detail::check_gat_dims(params, v_i.size());
  const Eigen::Index d_out = params.W.rows();
  Vector z_i = params.W * v_i;
  const double center = params.a.head(d_out).dot(z_i);
  Vector logits(static_cast<Eigen::Index>(neighbors.size()));
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    Vector z_j = params.W * neighbors[j];
    logits[static_cast<Eigen::Index>(j)] = detail::leaky_relu(
        center + params.a.tail(d_out).dot(z_j), params.leaky_slope);
  }
  detail::softmax_inplace(logits);
  return logits;
}

Vector gat_aggregate(const GatParams& params, const Vector& v_i,
                     const std::vector<Vector>& neighbors,
                     Nonlinearity sigma) {
  Vector weights = gat_attention(params, v_i, neighbors);
  Vector u = Vector::Zero(params.W.rows());
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    Vector z_j = params.W * neighbors[j];
    u += weights[static_cast<Eigen::Index>(j)] * z_j;
  }
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    u[k] = apply_nonlinearity(sigma, u[k]);
  }
  return u;
}

Vector residual_combine(const Vector& text_feature, const Vector& gnn_output) {
  if (text_feature.size() != gnn_output.size()) {
    throw DataError("residual_combine dimension mismatch");
  }
  return text_feature + gnn_output;
}

}  // namespace tgr
