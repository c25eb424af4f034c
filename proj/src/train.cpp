#include "specshift/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "specshift/errors.hpp"
#include "specshift/rng.hpp"

namespace specshift {

namespace {

// Seed stream salts: 0 init, 1 upsample, 2 augcyc, 1000+e epoch e shuffle.
constexpr std::uint64_t kInitSalt = 0;
constexpr std::uint64_t kUpsampleSalt = 1;
constexpr std::uint64_t kAugCycSalt = 2;
constexpr std::uint64_t kEpochSaltBase = 1000;

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.bounded(i)]);
}

double graph_loss(const ModelConfig& config, ModelParams& params,
                  const GraphInputs& in, bool with_grad, double grad_seed) {
  Tape tape;
  const ForwardNodes fwd = build_forward(tape, config, params, in);
  Tape::Node* loss = build_loss(tape, config, params, in, fwd);
  if (with_grad) tape.backward(loss, grad_seed);
  return loss->value(0, 0);
}

double classification_loss(const ModelConfig& config, ModelParams& params,
                           const GraphInputs& in) {
  Tape tape;
  const ForwardNodes fwd = build_forward(tape, config, params, in);
  return tape.cross_entropy_from_logits(fwd.logits, {in.label})->value(0, 0);
}

}  // namespace

Dataset augcyc_prepare(const std::vector<int>& train_indices,
                       const Dataset& dataset, int increments,
                       std::int64_t skip_ratio, std::uint64_t seed) {
  Dataset train_slice;
  train_slice.name = dataset.name;
  train_slice.class_count = dataset.class_count;
  for (int idx : train_indices) train_slice.graphs.push_back(dataset.graphs[idx]);

  Rng rng(seed);
  Dataset aligned =
      align_cycle_lengths(train_slice, skip_ratio, increments, rng);

  Dataset out = dataset;
  for (std::size_t i = 0; i < train_indices.size(); ++i)
    out.graphs[train_indices[i]] = std::move(aligned.graphs[i]);
  return out;
}

TrainReport train_model(const ModelConfig& config, const Dataset& dataset,
                        const SplitBundle& splits,
                        const UpsampleSpec& upsample_spec, std::uint64_t seed,
                        ModelParams* out_params) {
  const Dataset* data = &dataset;
  Dataset augmented;
  if (config.augcyc) {
    augmented = augcyc_prepare(splits.train, dataset,
                               config.augcyc->increments,
                               config.augcyc->skip_ratio,
                               derive_seed(seed, kAugCycSalt));
    data = &augmented;
  }

  const std::vector<GraphInputs> inputs = prepare_dataset(*data, config);
  std::vector<int> labels(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) labels[i] = inputs[i].label;

  const int input_width = std::max(1, data->feature_width());
  Rng init_rng(derive_seed(seed, kInitSalt));
  ModelParams params =
      init_params(config, input_width, data->class_count, init_rng);

  const std::vector<int> upsampled = upsample(
      splits.train, labels, upsample_spec, derive_seed(seed, kUpsampleSalt));

  Adam adam(params.all(), AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});

  TrainReport report;
  report.seed = seed;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_snapshot;

  std::vector<int> order = upsampled;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    Rng epoch_rng(derive_seed(seed, kEpochSaltBase + epoch));
    shuffle(order, epoch_rng);

    double epoch_loss = 0.0;
    int batch_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + config.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      params.zero_grads();
      double batch_loss = 0.0;
      try {
        for (std::size_t i = start; i < end; ++i)
          batch_loss += inv * graph_loss(config, params, inputs[order[i]],
                                         true, inv);
      } catch (const NumericError& err) {
        throw NumericError("training diverged at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_count) + ": " + err.what());
      }
      if (!std::isfinite(batch_loss))
        throw NumericError("training diverged at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_count));
      adam.step();
      epoch_loss += batch_loss;
      ++batch_count;
    }

    EpochTrace trace;
    trace.train_loss = batch_count ? epoch_loss / batch_count : 0.0;
    double val_loss = 0.0;
    for (int idx : splits.val)
      val_loss += classification_loss(config, params, inputs[idx]);
    trace.val_loss =
        splits.val.empty() ? 0.0 : val_loss / splits.val.size();
    report.epochs.push_back(trace);
    report.stopped_epoch = epoch + 1;

    if (trace.val_loss < best_val) {
      best_val = trace.val_loss;
      report.best_epoch = epoch;
      best_snapshot = params.snapshot_values();
    }
    if (epoch - report.best_epoch >= config.patience) break;
  }

  if (!best_snapshot.empty()) params.restore_values(best_snapshot);

  report.f1_train = evaluate_f1(config, params, inputs, splits.train);
  report.f1_val = evaluate_f1(config, params, inputs, splits.val);
  report.f1_small_test = evaluate_f1(config, params, inputs, splits.small_test);
  report.f1_large_test = evaluate_f1(config, params, inputs, splits.large_test);
  if (out_params) *out_params = std::move(params);
  return report;
}

F1Scores evaluate_f1(const ModelConfig& config, ModelParams& params,
                     const std::vector<GraphInputs>& inputs,
                     const std::vector<int>& indices) {
  // Confusion counts with class c as the positive class.
  long tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
  for (int idx : indices) {
    const GraphInputs& in = inputs[idx];
    if (in.label < 0 || in.label > 1)
      throw DataError("F1 evaluation requires binary classification");
    const int predicted = predict(config, params, in).label;
    for (int c = 0; c < 2; ++c) {
      if (predicted == c && in.label == c) ++tp[c];
      if (predicted == c && in.label != c) ++fp[c];
      if (predicted != c && in.label == c) ++fn[c];
    }
  }
  const auto f1_of = [&](int c) {
    const double denom_p = static_cast<double>(tp[c] + fp[c]);
    const double denom_r = static_cast<double>(tp[c] + fn[c]);
    const double precision = denom_p > 0 ? tp[c] / denom_p : 0.0;
    const double recall = denom_r > 0 ? tp[c] / denom_r : 0.0;
    return precision + recall > 0.0
               ? 2.0 * precision * recall / (precision + recall)
               : 0.0;
  };
  F1Scores out;
  out.class1 = f1_of(1);
  out.macro = 0.5 * (f1_of(0) + f1_of(1));
  return out;
}

std::string report_to_json(const TrainReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["best_epoch"] = report.best_epoch;
  j["stopped_epoch"] = report.stopped_epoch;
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : report.epochs)
    epochs.push_back({{"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  j["epochs"] = std::move(epochs);
  const auto f1 = [](const F1Scores& s) {
    return nlohmann::json{{"class1", s.class1}, {"macro", s.macro}};
  };
  j["f1"] = {{"train", f1(report.f1_train)},
             {"val", f1(report.f1_val)},
             {"small_test", f1(report.f1_small_test)},
             {"large_test", f1(report.f1_large_test)}};
  return j.dump(2);
}

}  // namespace specshift
