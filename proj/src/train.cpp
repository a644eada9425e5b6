#include "tgr/train.hpp"

#include <chrono>
#include <cmath>
#include <unordered_map>

namespace tgr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void xavier_fill(Matrix& m, Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rng.uniform(-bound, bound);
    }
  }
}

Vector uniform_row(Eigen::Index d, Rng& rng) {
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  Vector v(d);
  for (Eigen::Index k = 0; k < d; ++k) v[k] = rng.uniform(-bound, bound);
  return v;
}

double warmup_lr(double lr, double warmup_fraction, std::int64_t step,
                 std::int64_t total_steps) {
  const auto warmup_steps = std::max<std::int64_t>(
      1, std::llround(warmup_fraction * static_cast<double>(total_steps)));
  const double scale =
      std::min(1.0, static_cast<double>(step + 1) /
                        static_cast<double>(warmup_steps));
  return lr * scale;
}

/// Raw encodings for every entity with a text record, row per entity.
struct RawCache {
  std::vector<Eigen::Index> row_of;  // -1 for textless entities
  EmbeddingTable raw;
};

RawCache build_raw_cache(const SymbolTable& entities,
                         const std::unordered_map<EntityId, std::string>& texts,
                         const TextEncoder& encoder) {
  RawCache cache;
  cache.row_of.assign(entities.size(), -1);
  std::vector<EntityId> with_text;
  for (std::int32_t e = 0; e < entities.size(); ++e) {
    if (texts.contains(e)) {
      cache.row_of[e] = static_cast<Eigen::Index>(with_text.size());
      with_text.push_back(e);
    }
  }
  cache.raw.resize(static_cast<Eigen::Index>(with_text.size()),
                   encoder.raw_dim());
  for (std::size_t i = 0; i < with_text.size(); ++i) {
    const EntityId e = with_text[i];
    cache.raw.row(static_cast<Eigen::Index>(i)) =
        encoder.encode(entities.name(e), texts.at(e)).transpose();
  }
  return cache;
}

void project_unit_ball(Vector& v) {
  const double n = v.norm();
  if (n > 1.0) v /= n;
}

std::vector<std::pair<std::string, Vector>> optimizer_state_m(
    const std::vector<ParamView>& params, const Optimizer& opt) {
  std::vector<std::pair<std::string, Vector>> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.emplace_back(params[i].name, opt.moment1()[i]);
  }
  return out;
}

std::vector<std::pair<std::string, Vector>> optimizer_state_v(
    const std::vector<ParamView>& params, const Optimizer& opt) {
  std::vector<std::pair<std::string, Vector>> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.emplace_back(params[i].name, opt.moment2()[i]);
  }
  return out;
}

void restore_optimizer(Optimizer& opt, const std::vector<ParamView>& params,
                       const Checkpoint& ckpt) {
  std::vector<Vector> m, v;
  auto find = [](const std::vector<std::pair<std::string, Vector>>& state,
                 const std::string& name) -> const Vector& {
    for (const auto& [n, vec] : state) {
      if (n == name) return vec;
    }
    throw DataError("checkpoint optimizer state is missing slot " + name);
  };
  for (const ParamView& p : params) {
    m.push_back(find(ckpt.opt_m, p.name));
    v.push_back(find(ckpt.opt_v, p.name));
  }
  opt.restore(ckpt.opt_step, std::move(m), std::move(v));
}

}  // namespace

EmbeddingTable materialize_features(
    const ModelConfig& config, const MlpParams& mlp, const MlpParams& mlp_tail,
    const Vector& fallback, const SymbolTable& entities,
    const std::unordered_map<EntityId, std::string>& texts,
    const TextEncoder& encoder) {
  EmbeddingTable table = build_feature_table(entities, texts, encoder, mlp, fallback);
  if (!config.tied_mlp) {
    EmbeddingTable tail_table =
        build_feature_table(entities, texts, encoder, mlp_tail, fallback);
    table = (table + tail_table) / 2.0;
  }
  if (config.stage1.entity_norm) {
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
      Vector row = table.row(i);
      project_unit_ball(row);
      table.row(i) = row.transpose();
    }
  }
  return table;
}

Checkpoint train_stage1(const KnowledgeGraph& kg_train,
                        const std::unordered_map<EntityId, std::string>& texts,
                        const SymbolTable& entities, const ModelConfig& config,
                        const EpochLogger& log, const Checkpoint* resume) {
  config.validate();
  if (kg_train.triples.empty()) {
    throw DataError("stage 1 requires a nonempty training set");
  }
  if (entities.size() != kg_train.n_entities) {
    throw DataError("entity vocabulary does not match the graph");
  }
  const Eigen::Index d = config.dim;
  const Eigen::Index raw_dim = config.encoder.raw_dim;
  const Stage1Config& s1 = config.stage1;

  TextEncoder encoder(config.encoder);
  RawCache raw = build_raw_cache(entities, texts, encoder);

  MlpParams mlp, mlp_tail;
  Vector fallback;
  RelationEmbeddings relations;
  Rng data_rng(derive_seed(config.seed, "stage1/data"));
  std::int64_t start_epoch = 0;

  if (resume) {
    if (resume->stage != "stage1") {
      throw DataError("stage-1 resume requires a stage-1 checkpoint");
    }
    mlp = resume->mlp;
    mlp_tail = resume->mlp_tail;
    fallback = resume->fallback;
    relations = resume->relations;
    data_rng.restore_state(resume->prng_state);
    start_epoch = resume->epoch;
  } else {
    Rng init_rng(derive_seed(config.seed, "stage1/init"));
    mlp.W.resize(d, raw_dim);
    xavier_fill(mlp.W, init_rng);
    mlp.b = Vector::Zero(d);
    if (!config.tied_mlp) {
      mlp_tail.W.resize(d, raw_dim);
      xavier_fill(mlp_tail.W, init_rng);
      mlp_tail.b = Vector::Zero(d);
    }
    fallback = uniform_row(d, init_rng);
    relations = RelationEmbeddings::init(kg_train.n_relations, d, init_rng);
  }

  // Trainable slots; the inverse relation table is untouched by the
  // translational objective and keeps its initialization for later stages.
  std::vector<ParamView> params = mlp_views(mlp, "mlp");
  if (!config.tied_mlp) append_views(params, mlp_views(mlp_tail, "mlp_tail"));
  params.push_back(view("fallback", fallback));
  params.push_back(view("rel.forward", relations.forward));

  Optimizer opt(config.optimizer, params);
  if (resume) restore_optimizer(opt, params, *resume);

  const TripleSet known = make_triple_set(kg_train.triples);
  const auto n_train = kg_train.triples.size();
  const auto batches_per_epoch = static_cast<std::int64_t>(
      (n_train + s1.batch_size - 1) / s1.batch_size);
  const std::int64_t total_steps = batches_per_epoch * s1.epochs;
  const ScoreFnSpec stage1_score{ScoreVariant::TransE, s1.p_norm};

  MlpParams d_mlp = MlpParams::zeros(d, raw_dim);
  MlpParams d_mlp_tail = MlpParams::zeros(d, raw_dim);
  Vector d_fallback = Vector::Zero(d);
  EmbeddingTable d_rel_fwd = EmbeddingTable::Zero(kg_train.n_relations, d);

  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  for (std::int64_t epoch = start_epoch; epoch < s1.epochs; ++epoch) {
    const auto t0 = Clock::now();
    data_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_pairs = 0;
    double lr_now = s1.lr;

    for (std::int64_t batch = 0; batch < batches_per_epoch; ++batch) {
      const std::size_t begin = static_cast<std::size_t>(batch) * s1.batch_size;
      const std::size_t end = std::min(n_train, begin + s1.batch_size);

      // Unique (entity, role) instances of this batch. Roles matter only for
      // the untied head/tail reduction.
      std::unordered_map<std::uint64_t, int> slot_of;
      std::vector<std::pair<EntityId, int>> instances;
      auto slot = [&](EntityId e, int role) {
        const std::uint64_t key =
            config.tied_mlp ? static_cast<std::uint64_t>(e)
                            : static_cast<std::uint64_t>(e) * 2 + role;
        auto [it, inserted] =
            slot_of.emplace(key, static_cast<int>(instances.size()));
        if (inserted) instances.emplace_back(e, role);
        return it->second;
      };

      struct PairSlots {
        RelationId relation;
        int pos_h, pos_t, neg_h, neg_t;
      };
      std::vector<PairSlots> pairs;
      for (std::size_t i = begin; i < end; ++i) {
        const Triple& pos = kg_train.triples[order[i]];
        std::vector<Triple> negs =
            sample_negatives(pos, known, kg_train.n_entities,
                             s1.negatives_per_positive, s1.corrupt_mode,
                             data_rng);
        for (const Triple& neg : negs) {
          pairs.push_back(PairSlots{pos.relation, slot(pos.head, 0),
                                    slot(pos.tail, 1), slot(neg.head, 0),
                                    slot(neg.tail, 1)});
        }
      }

      // Forward the unique instances: batched GEMM for entities with text,
      // the shared fallback row otherwise.
      const int m = static_cast<int>(instances.size());
      std::vector<int> text_col(m, -1);
      std::vector<int> text_cols_inst;
      for (int i = 0; i < m; ++i) {
        if (raw.row_of[instances[i].first] >= 0) {
          text_col[i] = static_cast<int>(text_cols_inst.size());
          text_cols_inst.push_back(i);
        }
      }
      const int mt = static_cast<int>(text_cols_inst.size());
      Matrix x(raw_dim, mt);
      for (int c = 0; c < mt; ++c) {
        x.col(c) =
            raw.raw.row(raw.row_of[instances[text_cols_inst[c]].first])
                .transpose();
      }
      auto role_of = [&](int inst) { return instances[inst].second; };
      Matrix pre(d, mt), feat(d, m);
      for (int c = 0; c < mt; ++c) {
        const int inst = text_cols_inst[c];
        const MlpParams& p =
            (!config.tied_mlp && role_of(inst) == 1) ? mlp_tail : mlp;
        pre.col(c) = p.W * x.col(c) + p.b;
      }
      for (int i = 0; i < m; ++i) {
        if (text_col[i] >= 0) {
          feat.col(i) = pre.col(text_col[i]).cwiseMax(0.0);
          if (s1.entity_norm) {
            Vector f = feat.col(i);
            project_unit_ball(f);
            feat.col(i) = f;
          }
        } else {
          feat.col(i) = fallback;
        }
      }

      // Margin-ranking loss over the batch pairs, mean reduction.
      const double inv_pairs = 1.0 / static_cast<double>(pairs.size());
      Matrix d_feat = Matrix::Zero(d, m);
      double batch_loss = 0.0;
      Vector d_h(d), d_r(d), d_ri(d), d_t(d);
      Vector unused_inverse = Vector::Zero(d);
      for (const PairSlots& p : pairs) {
        Vector v_r = relations.forward.row(p.relation);
        const double s_pos = score_transe(Vector(feat.col(p.pos_h)), v_r,
                                          Vector(feat.col(p.pos_t)), s1.p_norm);
        const double s_neg = score_transe(Vector(feat.col(p.neg_h)), v_r,
                                          Vector(feat.col(p.neg_t)), s1.p_norm);
        batch_loss += margin_loss(s_pos, s_neg, s1.margin, Polarity::LowerBetter);
        const MarginGrad mg =
            margin_loss_backward(s_pos, s_neg, s1.margin, Polarity::LowerBetter);
        if (mg.d_pos != 0.0) {
          d_h.setZero(); d_r.setZero(); d_ri.setZero(); d_t.setZero();
          score_backward(stage1_score, feat.col(p.pos_h), v_r, unused_inverse,
                         feat.col(p.pos_t), mg.d_pos * inv_pairs, d_h, d_r,
                         d_ri, d_t);
          d_feat.col(p.pos_h) += d_h;
          d_feat.col(p.pos_t) += d_t;
          d_rel_fwd.row(p.relation) += d_r.transpose();

          d_h.setZero(); d_r.setZero(); d_ri.setZero(); d_t.setZero();
          score_backward(stage1_score, feat.col(p.neg_h), v_r, unused_inverse,
                         feat.col(p.neg_t), mg.d_neg * inv_pairs, d_h, d_r,
                         d_ri, d_t);
          d_feat.col(p.neg_h) += d_h;
          d_feat.col(p.neg_t) += d_t;
          d_rel_fwd.row(p.relation) += d_r.transpose();
        }
      }
      batch_loss *= inv_pairs;
      if (!std::isfinite(batch_loss)) {
        throw NumericError("stage 1: non-finite loss in epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch));
      }
      epoch_loss += batch_loss * static_cast<double>(pairs.size());
      epoch_pairs += pairs.size();

      // Backprop into the reductions / fallback.
      Matrix delta(d, mt);
      for (int c = 0; c < mt; ++c) {
        const int inst = text_cols_inst[c];
        delta.col(c) =
            (pre.col(c).array() > 0.0).select(d_feat.col(inst), 0.0);
      }
      if (config.tied_mlp) {
        if (mt > 0) {
          d_mlp.W.noalias() += delta * x.transpose();
          d_mlp.b += delta.rowwise().sum();
        }
      } else {
        for (int c = 0; c < mt; ++c) {
          const int inst = text_cols_inst[c];
          MlpParams& g = role_of(inst) == 1 ? d_mlp_tail : d_mlp;
          g.W.noalias() += delta.col(c) * x.col(c).transpose();
          g.b += delta.col(c);
        }
      }
      for (int i = 0; i < m; ++i) {
        if (text_col[i] < 0) d_fallback += d_feat.col(i);
      }

      const std::int64_t step = opt.step_count();
      lr_now = warmup_lr(s1.lr, s1.warmup_fraction, step, total_steps);
      std::vector<ParamView> grads = mlp_views(d_mlp, "mlp");
      if (!config.tied_mlp) append_views(grads, mlp_views(d_mlp_tail, "mlp_tail"));
      grads.push_back(view("fallback", d_fallback));
      grads.push_back(view("rel.forward", d_rel_fwd));
      opt.step(params, grads, lr_now);

      d_mlp.W.setZero();
      d_mlp.b.setZero();
      d_mlp_tail.W.setZero();
      d_mlp_tail.b.setZero();
      d_fallback.setZero();
      d_rel_fwd.setZero();
    }

    if (log) {
      log(EpochLog{"stage1", epoch,
                   epoch_pairs ? epoch_loss / double(epoch_pairs) : 0.0,
                   lr_now, ms_since(t0)});
    }
  }

  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.stage = "stage1";
  ckpt.epoch = s1.epochs;
  ckpt.prng_state = data_rng.serialize_state();
  ckpt.mlp = mlp;
  ckpt.mlp_tail = mlp_tail;
  ckpt.fallback = fallback;
  ckpt.relations = relations;
  ckpt.features = materialize_features(config, mlp, mlp_tail, fallback,
                                       entities, texts, encoder);
  ckpt.opt_step = opt.step_count();
  ckpt.opt_m = optimizer_state_m(params, opt);
  ckpt.opt_v = optimizer_state_v(params, opt);
  return ckpt;
}

Checkpoint make_random_checkpoint(const KnowledgeGraph& kg,
                                  const ModelConfig& config) {
  config.validate();
  const Eigen::Index d = config.dim;
  Rng rng(derive_seed(config.seed, "random/init"));
  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.stage = "random";
  ckpt.prng_state = rng.serialize_state();
  ckpt.features.resize(kg.n_entities, d);
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < ckpt.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      ckpt.features(i, j) = rng.uniform(-bound, bound);
    }
  }
  ckpt.mlp = MlpParams::zeros(d, config.encoder.raw_dim);
  if (!config.tied_mlp) {
    ckpt.mlp_tail = MlpParams::zeros(d, config.encoder.raw_dim);
  }
  ckpt.fallback = Vector::Zero(d);
  ckpt.relations = RelationEmbeddings::init(kg.n_relations, d, rng);
  ckpt.prng_state = rng.serialize_state();
  return ckpt;
}

double scored_pair_loss(const std::vector<Triple>& positives,
                        const std::vector<Triple>& negatives,
                        const EmbeddingTable& entity_table,
                        const RelationEmbeddings& relations,
                        const ScoreFnSpec& spec, double margin,
                        EmbeddingTable* d_table, RelationEmbeddings* d_rel) {
  if (positives.size() != negatives.size()) {
    throw ConfigError("positive and negative lists must align");
  }
  if (positives.empty()) return 0.0;
  const Eigen::Index d = entity_table.cols();
  const Polarity polarity = spec.polarity();
  const double inv = 1.0 / static_cast<double>(positives.size());
  double loss = 0.0;
  Vector d_h(d), d_r(d), d_ri(d), d_t(d);
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const Triple& pos = positives[i];
    const Triple& neg = negatives[i];
    Vector v_r = relations.forward.row(pos.relation);
    Vector v_ri = relations.inverse.row(pos.relation);
    Vector ph = entity_table.row(pos.head), pt = entity_table.row(pos.tail);
    Vector nh = entity_table.row(neg.head), nt = entity_table.row(neg.tail);
    const double s_pos = score_triple_vectors(spec, ph, v_r, v_ri, pt);
    const double s_neg = score_triple_vectors(spec, nh, v_r, v_ri, nt);
    loss += margin_loss(s_pos, s_neg, margin, polarity);
    if (!d_table && !d_rel) continue;
    const MarginGrad mg = margin_loss_backward(s_pos, s_neg, margin, polarity);
    if (mg.d_pos == 0.0) continue;
    auto apply = [&](const Triple& t, const Vector& vh, const Vector& vt,
                     double scale) {
      d_h.setZero(); d_r.setZero(); d_ri.setZero(); d_t.setZero();
      score_backward(spec, vh, v_r, v_ri, vt, scale, d_h, d_r, d_ri, d_t);
      if (d_table) {
        d_table->row(t.head) += d_h.transpose();
        d_table->row(t.tail) += d_t.transpose();
      }
      if (d_rel) {
        d_rel->forward.row(t.relation) += d_r.transpose();
        d_rel->inverse.row(t.relation) += d_ri.transpose();
      }
    };
    apply(pos, ph, pt, mg.d_pos * inv);
    apply(neg, nh, nt, mg.d_neg * inv);
  }
  return loss * inv;
}

Checkpoint train_stage2(const KnowledgeGraph& kg_train, const Checkpoint& init,
                        const ModelConfig& config,
                        const std::vector<Triple>* dev, const EpochLogger& log,
                        const Checkpoint* resume) {
  config.validate();
  if (config.gnn == GnnVariant::None) {
    throw ConfigError("stage 2 requires gnn variant gat or rgcn");
  }
  if (kg_train.triples.empty()) {
    throw DataError("stage 2 requires a nonempty training set");
  }
  const Eigen::Index d = config.dim;
  if (init.features.cols() != d) {
    throw DataError("stage-1 checkpoint dimension does not match the config");
  }
  if (init.features.rows() != kg_train.n_entities ||
      init.relations.forward.rows() != kg_train.n_relations) {
    throw DataError("checkpoint shapes do not match the graph");
  }
  const Stage2Config& s2 = config.stage2;

  EmbeddingTable features = init.features;
  RelationEmbeddings relations = init.relations;
  LayerStack stack;
  Rng data_rng(derive_seed(config.seed, "stage2/data"));
  std::int64_t start_epoch = 0;

  if (resume) {
    if (resume->stage != "stage2") {
      throw DataError("stage-2 resume requires a stage-2 checkpoint");
    }
    stack = resume->stack;
    features = resume->features;
    relations = resume->relations;
    data_rng.restore_state(resume->prng_state);
    start_epoch = resume->epoch;
  } else {
    Rng init_rng(derive_seed(config.seed, "stage2/init"));
    stack = LayerStack::init(config.gnn, config.depth, config.heads, d,
                             kg_train.n_relations, config.leaky_slope,
                             s2.zero_init_stack, init_rng);
  }

  std::vector<ParamView> params = stack_views(stack);
  if (!s2.freeze_text) params.push_back(view("features", features));
  Optimizer opt(config.optimizer, params);
  if (resume) restore_optimizer(opt, params, *resume);

  const GnnGraph graph = build_gnn_graph(kg_train);
  const TripleSet known = make_triple_set(kg_train.triples);
  TripleSet known_with_dev = known;
  if (dev) {
    for (const Triple& t : *dev) known_with_dev.insert(t);
  }

  LayerStack stack_grads = stack.zeros_like();
  EmbeddingTable d_features;
  StackCache cache;

  struct Best {
    double mrr = -1.0;
    LayerStack stack;
    EmbeddingTable features;
  };
  Best best;
  int bad_checks = 0;
  std::int64_t epochs_done = start_epoch;

  for (std::int64_t epoch = start_epoch; epoch < s2.epochs; ++epoch) {
    const auto t0 = Clock::now();
    EmbeddingTable entity_table = forward_all_cached(stack, features, graph, cache);

    std::vector<Triple> positives, negatives;
    positives.reserve(kg_train.triples.size() * s2.negatives_per_positive);
    negatives.reserve(positives.capacity());
    for (const Triple& pos : kg_train.triples) {
      std::vector<Triple> negs =
          sample_negatives(pos, known, kg_train.n_entities,
                           s2.negatives_per_positive, s2.corrupt_mode,
                           data_rng);
      for (const Triple& neg : negs) {
        positives.push_back(pos);
        negatives.push_back(neg);
      }
    }

    EmbeddingTable d_table =
        EmbeddingTable::Zero(entity_table.rows(), entity_table.cols());
    const double loss =
        scored_pair_loss(positives, negatives, entity_table, relations,
                         config.score, s2.margin, &d_table, nullptr);
    if (!std::isfinite(loss)) {
      throw NumericError("stage 2: non-finite loss in epoch " +
                         std::to_string(epoch));
    }

    for (ParamView& g : stack_views(stack_grads)) {
      Eigen::Map<Vector>(g.data, g.size).setZero();
    }
    if (!s2.freeze_text) {
      d_features = EmbeddingTable::Zero(features.rows(), features.cols());
    }
    backward_all(stack, graph, cache, d_table, stack_grads,
                 s2.freeze_text ? nullptr : &d_features);

    std::vector<ParamView> grads = stack_views(stack_grads);
    if (!s2.freeze_text) grads.push_back(view("features", d_features));
    opt.step(params, grads, s2.lr);
    epochs_done = epoch + 1;

    if (log) {
      log(EpochLog{"stage2", epoch, loss, s2.lr, ms_since(t0)});
    }

    if (s2.early_stop && dev && !dev->empty() &&
        (epoch + 1) % s2.eval_every == 0) {
      StackCache eval_cache;
      EmbeddingTable eval_table =
          forward_all_cached(stack, features, graph, eval_cache);
      RankingReport report =
          evaluate(*dev, eval_table, relations, config.score,
                   Protocol::Filtered, Side::Both, known_with_dev);
      if (report.overall.mrr > best.mrr) {
        best = Best{report.overall.mrr, stack, features};
        bad_checks = 0;
      } else if (++bad_checks >= s2.patience) {
        stack = best.stack;
        features = best.features;
        break;
      }
    }
  }
  if (s2.early_stop && best.mrr >= 0.0) {
    stack = best.stack;
    features = best.features;
  }

  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.stage = "stage2";
  ckpt.epoch = epochs_done;
  ckpt.prng_state = data_rng.serialize_state();
  ckpt.mlp = init.mlp;
  ckpt.mlp_tail = init.mlp_tail;
  ckpt.fallback = init.fallback;
  ckpt.relations = relations;
  ckpt.features = features;
  ckpt.stack = stack;
  ckpt.opt_step = opt.step_count();
  {
    std::vector<ParamView> final_params = stack_views(stack);
    if (!s2.freeze_text) final_params.push_back(view("features", features));
    ckpt.opt_m = optimizer_state_m(final_params, opt);
    ckpt.opt_v = optimizer_state_v(final_params, opt);
  }
  return ckpt;
}

EmbeddingTable checkpoint_entity_table(const Checkpoint& ckpt,
                                       const KnowledgeGraph& kg_train) {
  if (ckpt.stack.variant == GnnVariant::None) return ckpt.features;
  return forward_all(ckpt.stack, ckpt.features, kg_train);
}

GradCheckReport gradient_check(const std::function<double()>& loss,
                               const std::vector<ParamView>& params,
                               const std::vector<ParamView>& analytic_grads,
                               double h, double tol, std::size_t max_coords) {
  if (params.size() != analytic_grads.size()) {
    throw ConfigError("gradient_check: slot mismatch");
  }
  std::int64_t total = 0;
  for (const ParamView& p : params) total += p.size;
  const std::int64_t stride =
      std::max<std::int64_t>(1, total / static_cast<std::int64_t>(max_coords));

  GradCheckReport report;
  for (std::int64_t k = 0; k < total; k += stride) {
    // Locate coordinate k.
    std::int64_t offset = k;
    std::size_t slot = 0;
    while (offset >= params[slot].size) {
      offset -= params[slot].size;
      ++slot;
    }
    double* coord = params[slot].data + offset;
    const double saved = *coord;
    *coord = saved + h;
    const double up = loss();
    *coord = saved - h;
    const double down = loss();
    *coord = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = analytic_grads[slot].data[offset];
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    const double rel_err = std::abs(analytic - numeric) / denom;
    ++report.coords_checked;
    report.max_rel_err = std::max(report.max_rel_err, rel_err);
    if (rel_err > tol) {
      report.failures.push_back(GradCheckFailure{
          params[slot].name, offset, analytic, numeric, rel_err});
    }
  }
  return report;
}

}  // namespace tgr
