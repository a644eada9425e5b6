#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tgr/checkpoint.hpp"
#include "tgr/config.hpp"
#include "tgr/eval.hpp"
#include "tgr/graph.hpp"
#include "tgr/negatives.hpp"

namespace tgr {

struct EpochLog {
  std::string stage;
  std::int64_t epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  double wall_ms = 0.0;
};
using EpochLogger = std::function<void(const EpochLog&)>;

/// Stage 1: trains the reduction MLP, the textless-entity fallback vector and
/// the forward relation vectors against the translational objective over the
/// training triples, with linear LR warmup. Returns a checkpoint with the
/// feature table materialized. `resume` continues an earlier checkpoint of
/// the same config bit-for-bit.
Checkpoint train_stage1(const KnowledgeGraph& kg_train,
                        const std::unordered_map<EntityId, std::string>& texts,
                        const SymbolTable& entities, const ModelConfig& config,
                        const EpochLogger& log = nullptr,
                        const Checkpoint* resume = nullptr);

/// Random starting point for a graph-only run: feature table and relation
/// vectors drawn fresh, no text involved.
Checkpoint make_random_checkpoint(const KnowledgeGraph& kg,
                                  const ModelConfig& config);

/// Stage 2: full-graph forward each epoch, margin loss over the training
/// triples with per-epoch resampled negatives, gradients into the stack (and
/// into the feature table when freeze_text is false). Relation vectors start
/// from the input checkpoint and stay fixed. `dev` enables the optional
/// MRR-based early stopping when config.stage2.early_stop is set.
Checkpoint train_stage2(const KnowledgeGraph& kg_train, const Checkpoint& init,
                        const ModelConfig& config,
                        const std::vector<Triple>* dev = nullptr,
                        const EpochLogger& log = nullptr,
                        const Checkpoint* resume = nullptr);

/// Materializes the per-entity text features for a checkpoint's parameters
/// (untied head/tail reductions are averaged; the unit-ball projection is
/// applied when configured).
EmbeddingTable materialize_features(
    const ModelConfig& config, const MlpParams& mlp, const MlpParams& mlp_tail,
    const Vector& fallback, const SymbolTable& entities,
    const std::unordered_map<EntityId, std::string>& texts,
    const TextEncoder& encoder);

/// Entity table used for scoring a checkpoint: feature table for stage-1
/// checkpoints, stack output + residual for stage-2 ones.
EmbeddingTable checkpoint_entity_table(const Checkpoint& ckpt,
                                       const KnowledgeGraph& kg_train);

struct GradCheckFailure {
  std::string param;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t coords_checked = 0;
  std::vector<GradCheckFailure> failures;  // rel_err > tol

  bool ok() const { return failures.empty(); }
};

/// Central-difference check of `analytic_grads` against `loss` at step h,
/// subsampled to at most `max_coords` coordinates (even stride). Relative
/// error uses max(|analytic|, |numeric|, 1e-6) as denominator.
GradCheckReport gradient_check(const std::function<double()>& loss,
                               const std::vector<ParamView>& params,
                               const std::vector<ParamView>& analytic_grads,
                               double h, double tol,
                               std::size_t max_coords = 500);

/// Mean margin loss and the gradient w.r.t. the entity table for a batch of
/// (positive, negative) pairs scored on `entity_table`. Relation gradients go
/// to `d_rel` when non-null. Shared by stage 2 and the gradient checks.
double scored_pair_loss(const std::vector<Triple>& positives,
                        const std::vector<Triple>& negatives,
                        const EmbeddingTable& entity_table,
                        const RelationEmbeddings& relations,
                        const ScoreFnSpec& spec, double margin,
                        EmbeddingTable* d_table,
                        RelationEmbeddings* d_rel = nullptr);

}  // namespace tgr
