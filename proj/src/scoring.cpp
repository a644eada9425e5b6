#include "tgr/scoring.hpp"

namespace tgr {

double score_simple_canonical(const Vector& v_h, const Vector& v_r,
                              const Vector& v_r_inv, const Vector& v_t) {
  const Eigen::Index d = v_h.size();
  if (d % 2 != 0) {
    throw ConfigError("simple-canonical requires an even dimension");
  }
  const Eigen::Index m = d / 2;
  double fwd = v_h.head(m).cwiseProduct(v_r.head(m)).cwiseProduct(v_t.tail(m)).sum();
  double inv =
      v_t.head(m).cwiseProduct(v_r_inv.head(m)).cwiseProduct(v_h.tail(m)).sum();
  return (fwd + inv) / 2.0;
}

double score_triple_vectors(const ScoreFnSpec& spec, const Vector& v_h,
                            const Vector& v_r, const Vector& v_r_inv,
                            const Vector& v_t) {
  switch (spec.variant) {
    case ScoreVariant::TransE:
      return score_transe(v_h, v_r, v_t, spec.p_norm);
    case ScoreVariant::DistMult:
      return score_distmult(v_h, v_r, v_t);
    case ScoreVariant::Simple:
      return score_simple(v_h, v_r, v_r_inv, v_t);
    case ScoreVariant::SimpleCanonical:
      return score_simple_canonical(v_h, v_r, v_r_inv, v_t);
  }
  throw ConfigError("unknown score variant");
}

void score_backward(const ScoreFnSpec& spec, const Vector& v_h,
                    const Vector& v_r, const Vector& v_r_inv,
                    const Vector& v_t, double d_score, Vector& d_h,
                    Vector& d_r, Vector& d_r_inv, Vector& d_t) {
  switch (spec.variant) {
    case ScoreVariant::TransE: {
      Vector diff = v_h + v_r - v_t;
      Vector g;
      if (spec.p_norm == 1) {
        g = diff.array().sign().matrix() * d_score;
      } else {
        double norm = diff.norm();
        if (norm == 0.0) return;
        g = diff * (d_score / norm);
      }
      d_h += g;
      d_r += g;
      d_t -= g;
      return;
    }
    case ScoreVariant::DistMult: {
      d_h += v_r.cwiseProduct(v_t) * d_score;
      d_r += v_h.cwiseProduct(v_t) * d_score;
      d_t += v_h.cwiseProduct(v_r) * d_score;
      return;
    }
    case ScoreVariant::Simple: {
      Vector r_sum = (v_r + v_r_inv) * (0.5 * d_score);
      d_h += r_sum.cwiseProduct(v_t);
      d_t += r_sum.cwiseProduct(v_h);
      Vector ht = v_h.cwiseProduct(v_t) * (0.5 * d_score);
      d_r += ht;
      d_r_inv += ht;
      return;
    }
    case ScoreVariant::SimpleCanonical: {
      const Eigen::Index m = v_h.size() / 2;
      const double s = 0.5 * d_score;
      d_h.head(m) += v_r.head(m).cwiseProduct(v_t.tail(m)) * s;
      d_r.head(m) += v_h.head(m).cwiseProduct(v_t.tail(m)) * s;
      d_t.tail(m) += v_h.head(m).cwiseProduct(v_r.head(m)) * s;
      d_t.head(m) += v_r_inv.head(m).cwiseProduct(v_h.tail(m)) * s;
      d_r_inv.head(m) += v_t.head(m).cwiseProduct(v_h.tail(m)) * s;
      d_h.tail(m) += v_t.head(m).cwiseProduct(v_r_inv.head(m)) * s;
      return;
    }
  }
  throw ConfigError("unknown score variant");
}

double margin_loss(double pos_score, double neg_score, double margin,
                   Polarity polarity) {
  if (!(margin > 0.0)) throw ConfigError("margin must be positive");
  double x = polarity == Polarity::LowerBetter
                 ? margin + pos_score - neg_score
                 : margin - pos_score + neg_score;
  return x > 0.0 ? x : 0.0;
}

MarginGrad margin_loss_backward(double pos_score, double neg_score,
                                double margin, Polarity polarity) {
  MarginGrad g;
  if (margin_loss(pos_score, neg_score, margin, polarity) > 0.0) {
    if (polarity == Polarity::LowerBetter) {
      g.d_pos = 1.0;
      g.d_neg = -1.0;
    } else {
      g.d_pos = -1.0;
      g.d_neg = 1.0;
    }
  }
  return g;
}

RelationEmbeddings RelationEmbeddings::init(Eigen::Index n_relations,
                                            Eigen::Index d, Rng& rng) {
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  RelationEmbeddings rel;
  rel.forward.resize(n_relations, d);
  rel.inverse.resize(n_relations, d);
  for (Eigen::Index i = 0; i < n_relations; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      rel.forward(i, j) = rng.uniform(-bound, bound);
    }
  }
  for (Eigen::Index i = 0; i < n_relations; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      rel.inverse(i, j) = rng.uniform(-bound, bound);
    }
  }
  return rel;
}

}  // namespace tgr
