#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "datapipe/augment.hpp"
#include "model/driving_net.hpp"
#include "training/losses.hpp"
#include "training/objective.hpp"
#include "training/train_set.hpp"

namespace fusiondrive::train {

struct TrainConfig {
  double initial_lr = 3e-4;
  double lr_decay_factor = 0.5;
  int lr_patience_epochs = 5;
  int batch_size = 32;
  int max_epochs = 100;
  int early_stop_patience = 20;
  unsigned long long seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  double momentum_decay = 4e-3;
  bool augment = true;
  data::AugmentParams augmentation;
  int eval_batch_size = 64;

  bool operator==(const TrainConfig&) const = default;
  /// Throws Error(kConfig).
  void validate() const;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, initial_lr, lr_decay_factor, lr_patience_epochs,
                                                batch_size, max_epochs, early_stop_patience, seed, beta1, beta2,
                                                epsilon, momentum_decay, augment, augmentation, eval_batch_size)

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;  // used during this epoch
  LossBreakdown train;
  LossBreakdown validation;
  bool improved = false;

  bool operator==(const EpochRecord&) const = default;
};

enum class StopReason { kMaxEpochs, kEarlyStop };
const char* to_string(StopReason r);

struct TrainReport {
  LossBreakdown baseline;  // validation loss of the initial weights
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;      // 0 = initial weights
  double best_validation = 0.0;
  StopReason stop = StopReason::kMaxEpochs;

  std::vector<double> lr_history() const;
  /// One row per epoch plus a trailing summary comment.
  std::string to_csv() const;
  bool operator==(const TrainReport&) const = default;
};

struct TrainResult {
  std::unique_ptr<model::DrivingNet<float>> net;  // best-validation weights
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training of the joint loss with NAdam, plateau halving of the
/// learning rate and early stopping. When `validation` is empty the training
/// set (without augmentation) is used for model selection. Throws
/// Error(kDivergence) on a non-finite loss and Error(kEmptyInput) on an
/// empty training set.
TrainResult train_model(const TrainSet& train, const TrainSet& validation, const model::ModelConfig& model_config,
                        const TrainConfig& config, const LossWeights& weights, const EpochCallback& on_epoch = {});

/// Sample-weighted mean loss in inference mode.
LossBreakdown evaluate_loss(model::DrivingNet<float>& net, const TrainSet& set, const LossWeights& weights,
                            int batch_size = 64);

struct FitMetrics {
  double steer_mae = 0.0;
  double speed_mae = 0.0;       // normalized
  double pixel_accuracy = 0.0;  // NaN without a decoder
};

FitMetrics evaluate_fit(model::DrivingNet<float>& net, const TrainSet& set, int batch_size = 64);

}  // namespace fusiondrive::train
