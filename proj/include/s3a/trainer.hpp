#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "s3a/autoencoder.hpp"
#include "s3a/partition.hpp"
#include "s3a/sparsity.hpp"

namespace s3a {

struct TrainConfig {
  double lambda = 0.1;
  double learning_rate = 0.01;
  std::size_t pretrain_epochs = 100;
  std::size_t finetune_epochs = 100;
  /// Gradient steps between IRLS weight refreshes.
  std::size_t irls_refresh_every = 10;
  double epsilon = 1e-4;
  std::uint64_t seed = 0;
  std::optional<double> grad_clip;
  /// Early stop once the relative objective change stays below this for
  /// `patience` consecutive epochs.
  double tolerance = 1e-7;
  std::size_t patience = 5;
  /// SubclassL21 for the subclass-supervised objective, ClassL21 for class-only grouping.
  PenaltyKind finetune_penalty = PenaltyKind::SubclassL21;

  void validate() const;
};

struct EpochRecord {
  std::size_t layer = 0;
  std::size_t epoch = 0;
  double recon = 0.0;
  double penalty = 0.0;
  double total = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  /// One entry per trained layer: "max_epochs" or "converged".
  std::vector<std::string> stop_reasons;
  double final_objective = 0.0;

  std::size_t epochs_run() const noexcept { return epochs.size(); }
  /// One JSON object per line: {"epoch","layer","penalty","recon","total"}.
  std::string to_jsonl() const;

  bool operator==(const TrainReport&) const = default;
};

/// Greedy layer-wise gradient descent: layer k is trained for `epochs` steps
/// on the codes of the already-trained layers below it, with `penalty` on its
/// own pre-activation codes. Grouped penalties use IRLS weights refreshed
/// every cfg.irls_refresh_every steps; the recorded penalty is the true one.
std::pair<AutoencoderParams, TrainReport> train_stack(AutoencoderParams p, const Matrix& X,
                                                      const PenaltySpec& penalty,
                                                      std::size_t epochs, const TrainConfig& cfg);

/// Unsupervised L1-regularized pretraining from init_params(X.rows(), dims, cfg.seed).
std::pair<AutoencoderParams, TrainReport> pretrain(const Matrix& X,
                                                   const std::vector<std::size_t>& dims,
                                                   const TrainConfig& cfg);

/// Class/subclass-supervised fine-tuning with the grouped l2,1 penalty.
std::pair<AutoencoderParams, TrainReport> finetune(AutoencoderParams p, const Matrix& X,
                                                   const GroupPartition& partition,
                                                   const TrainConfig& cfg);

/// The penalty used by finetune for this partition and config.
PenaltySpec finetune_penalty(const GroupPartition& partition, const TrainConfig& cfg);

struct ObjectiveTerms {
  double recon = 0.0;
  double penalty = 0.0;

  double total() const noexcept { return recon + penalty; }
};

/// Sum over layers of each layer's reconstruction loss on its input codes and
/// its penalty. Without a partition the penalty is the L1 pretraining term.
ObjectiveTerms objective(const AutoencoderParams& p, const Matrix& X,
                         const std::optional<GroupPartition>& partition, const TrainConfig& cfg);

/// Max relative error between the analytic gradient and central differences
/// (h = 1e-6) of the per-layer surrogate objective, over every weight entry,
/// with IRLS weights frozen at the current point.
double grad_check(const AutoencoderParams& p, const Matrix& X, const GroupPartition& partition,
                  const TrainConfig& cfg);

/// Gradients of one layer's surrogate objective at fixed IRLS weights.
struct LayerGradient {
  double recon = 0.0;
  double surrogate = 0.0;
  Matrix dW;
  Matrix dW_prime;
};

LayerGradient layer_gradient(const LayerParams& layer, const Matrix& X, const PenaltySpec& penalty,
                             const IrlsState* state);

}  // namespace s3a
