#ifndef SPECSHIFT_TRAIN_HPP
#define SPECSHIFT_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "specshift/model.hpp"

namespace specshift {

struct EpochTrace {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct F1Scores {
  double class1 = 0.0;
  double macro = 0.0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  std::vector<EpochTrace> epochs;
  int best_epoch = -1;    // epoch with the lowest validation loss
  int stopped_epoch = 0;  // number of epochs actually run
  F1Scores f1_train, f1_val, f1_small_test, f1_large_test;
};

/// Replaces the training graphs by their cycle-length-aligned versions
/// (every skip_ratio-th graph of the train list, `increments` passes each);
/// validation and test graphs are untouched.
Dataset augcyc_prepare(const std::vector<int>& train_indices,
                       const Dataset& dataset, int increments,
                       std::int64_t skip_ratio, std::uint64_t seed);

/// Full training run: upsampled shuffled batches of config.batch_size,
/// one Adam step per batch, per-epoch validation loss, best-epoch
/// checkpointing, early stopping after config.patience epochs without
/// improvement. Deterministic for a fixed (config, dataset, splits, seed).
/// When `out_params` is non-null it receives the best parameters.
TrainReport train_model(const ModelConfig& config, const Dataset& dataset,
                        const SplitBundle& splits,
                        const UpsampleSpec& upsample_spec, std::uint64_t seed,
                        ModelParams* out_params = nullptr);

/// F1 with class 1 as the positive class (0 when precision + recall is 0)
/// plus the macro average over both classes. Binary classification only.
F1Scores evaluate_f1(const ModelConfig& config, ModelParams& params,
                     const std::vector<GraphInputs>& inputs,
                     const std::vector<int>& indices);

std::string report_to_json(const TrainReport& report);

}  // namespace specshift

#endif
