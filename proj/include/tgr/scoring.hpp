#pragma once

#include <cmath>
#include <string>

#include "tgr/common.hpp"
#include "tgr/rng.hpp"

namespace tgr {

/// Whether a smaller or larger score means a more plausible triple.
enum class Polarity { LowerBetter, HigherBetter };

enum class ScoreVariant { TransE, DistMult, Simple, SimpleCanonical };

struct ScoreFnSpec {
  ScoreVariant variant = ScoreVariant::TransE;
  int p_norm = 2;  // TransE only

  void validate() const {
    if (p_norm != 1 && p_norm != 2) {
      throw ConfigError("TransE p-norm must be 1 or 2");
    }
  }

  Polarity polarity() const {
    return variant == ScoreVariant::TransE ? Polarity::LowerBetter
                                           : Polarity::HigherBetter;
  }

  bool uses_inverse() const {
    return variant == ScoreVariant::Simple ||
           variant == ScoreVariant::SimpleCanonical;
  }
};

/// ||v_h + v_r - v_t||_p. Dissimilarity: lower is more plausible.
template <class DH, class DR, class DT>
double score_transe(const Eigen::MatrixBase<DH>& v_h,
                    const Eigen::MatrixBase<DR>& v_r,
                    const Eigen::MatrixBase<DT>& v_t, int p_norm = 2) {
  Vector diff = v_h + v_r - v_t;
  return p_norm == 1 ? diff.template lpNorm<1>() : diff.norm();
}

/// sum_k v_h[k] v_r[k] v_t[k]. Similarity: higher is more plausible.
/// Grouped as (v_h*v_t)*v_r so the h/t symmetry is exact in floating point.
template <class DH, class DR, class DT>
double score_distmult(const Eigen::MatrixBase<DH>& v_h,
                      const Eigen::MatrixBase<DR>& v_r,
                      const Eigen::MatrixBase<DT>& v_t) {
  return (v_h.cwiseProduct(v_t).cwiseProduct(v_r)).sum();
}

/// (sum v_h*v_r*v_t + sum v_h*v_r_inv*v_t) / 2, elementwise triple products.
/// Symmetric in (h, t) by algebra; see score_simple_canonical for the
/// role-split form that can represent asymmetric relations.
template <class DH, class DR, class DRI, class DT>
double score_simple(const Eigen::MatrixBase<DH>& v_h,
                    const Eigen::MatrixBase<DR>& v_r,
                    const Eigen::MatrixBase<DRI>& v_r_inv,
                    const Eigen::MatrixBase<DT>& v_t) {
  Vector ht = v_h.cwiseProduct(v_t);
  return (ht.cwiseProduct(v_r).sum() + ht.cwiseProduct(v_r_inv).sum()) / 2.0;
}

/// Role-split variant: the first half of an entity vector acts as its head
/// role and the second half as its tail role, with the inverse-relation term
/// swapping roles. Requires even dimension. Can score (h, r, t) and
/// (t, r, h) differently.
double score_simple_canonical(const Vector& v_h, const Vector& v_r,
                              const Vector& v_r_inv, const Vector& v_t);

double score_triple_vectors(const ScoreFnSpec& spec, const Vector& v_h,
                            const Vector& v_r, const Vector& v_r_inv,
                            const Vector& v_t);

/// d(score)/d(inputs) scaled by d_score, accumulated into the outputs.
/// TransE p=2 at zero difference and p=1 at zero coordinates use the zero
/// subgradient.
void score_backward(const ScoreFnSpec& spec, const Vector& v_h,
                    const Vector& v_r, const Vector& v_r_inv,
                    const Vector& v_t, double d_score, Vector& d_h,
                    Vector& d_r, Vector& d_r_inv, Vector& d_t);

/// Margin ranking loss over one (positive, negative) score pair.
/// lower-better: max(0, margin + pos - neg); higher-better mirrors the signs.
double margin_loss(double pos_score, double neg_score, double margin,
                   Polarity polarity);

/// (dL/dpos, dL/dneg); the hinge is inactive at exactly zero loss.
struct MarginGrad {
  double d_pos = 0.0;
  double d_neg = 0.0;
};
MarginGrad margin_loss_backward(double pos_score, double neg_score,
                                double margin, Polarity polarity);

/// Forward and inverse relation vectors; the inverse rows are consumed only
/// by the SimplE variants.
struct RelationEmbeddings {
  EmbeddingTable forward;
  EmbeddingTable inverse;

  /// Uniform(-6/sqrt(d), +6/sqrt(d)) entries, forward table first.
  static RelationEmbeddings init(Eigen::Index n_relations, Eigen::Index d,
                                 Rng& rng);
};

}  // namespace tgr
