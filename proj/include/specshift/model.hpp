#ifndef SPECSHIFT_MODEL_HPP
#define SPECSHIFT_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specshift/cycles.hpp"
#include "specshift/dataset.hpp"
#include "specshift/splits.hpp"
#include "specshift/spectral.hpp"
#include "specshift/tensor.hpp"

namespace specshift {

enum class Backbone { gcn, mlp };
enum class Readout { global_max, global_mean, sia };

struct AugCycConfig {
  int increments = 1;        // n: add_one_cycle_length passes per graph
  std::int64_t skip_ratio = 1;  // R: transform every R-th training graph
};

struct ModelConfig {
  Backbone backbone = Backbone::gcn;
  int layers = 3;
  int hidden = 64;
  Readout readout = Readout::global_max;
  double ssl_lambda = 0.0;  // 0 disables the auxiliary cycle loss
  std::optional<AugCycConfig> augcyc;
  double learning_rate = 1e-3;
  int batch_size = 30;
  int max_epochs = 500;
  int patience = 50;

  bool needs_cycles() const {
    return readout == Readout::sia || ssl_lambda > 0.0;
  }
};

/// Line-oriented `key = value` config text; `#` starts a comment. Keys:
/// backbone, layers, hidden, readout, ssl_lambda, augcyc_n, augcyc_r, lr,
/// batch_size, max_epochs, patience, and upsample.<class> = fraction:ratio.
struct RunConfig {
  ModelConfig model;
  UpsampleSpec upsample;
};
RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(const std::string& text);
std::string format_run_config(const RunConfig& config);

/// Weights of the 3-layer backbone, the classifier head, and the optional
/// SIA / SSL heads. Tensor order is fixed (conv layers, classifier, sia,
/// ssl) so the flat binary serialization is stable for a given config.
struct ModelParams {
  std::vector<Tensor> conv;
  Tensor cls_w, cls_b;
  std::optional<Tensor> sia_w;  // 2 x 1
  struct SslHead {
    Tensor w1, b1, w2, b2;
  };
  std::optional<SslHead> ssl;

  std::vector<Tensor*> all();
  std::vector<const Tensor*> all() const;
  void zero_grads();
  /// Deep copy of values only (used for best-epoch snapshots).
  std::vector<Matrix> snapshot_values() const;
  void restore_values(const std::vector<Matrix>& snapshot);
};

ModelParams init_params(const ModelConfig& config, int input_width,
                        int class_count, Rng& rng);
void save_params(const ModelParams& params, const std::filesystem::path& path);
void load_params(ModelParams& params, const std::filesystem::path& path);

/// Per-graph constants cached at load time: input features (a single ones
/// column when the dataset carries none), the propagation matrix for GCN,
/// and the cycle feature matrix / membership labels for SIA and SSL.
struct GraphInputs {
  int node_count = 0;
  int label = 0;
  Matrix features;
  Matrix propagation;     // empty unless the backbone is gcn
  Matrix cycle_features;  // empty unless cycles are needed
  std::vector<int> cycle_membership;
};

GraphInputs prepare_graph(const Graph& g, const ModelConfig& config);
std::vector<GraphInputs> prepare_dataset(const Dataset& d,
                                         const ModelConfig& config);

/// Tape-built forward pass; node_reps are the last-layer representations
/// X^(Last), logits the 1 x class_count classifier output.
struct ForwardNodes {
  Tape::Node* node_reps = nullptr;
  Tape::Node* logits = nullptr;
};
ForwardNodes build_forward(Tape& tape, const ModelConfig& config,
                           ModelParams& params, const GraphInputs& in);

/// Classification loss plus lambda times the SSL cycle-membership loss
/// (the SSL branch is only built when lambda > 0).
Tape::Node* build_loss(Tape& tape, const ModelConfig& config,
                       ModelParams& params, const GraphInputs& in,
                       const ForwardNodes& fwd);

/// Convenience no-grad surfaces used by tests and the eval path.
Matrix backbone_forward(const ModelConfig& config, ModelParams& params,
                        const Graph& g, const Matrix& x0);
/// SIA readout of cached cycle features C against X^(Last): scores
/// C w_A, attention k = softmax(scores) * N, column max of Diag(k) X.
Matrix sia_readout(const Matrix& cycle_features, const Matrix& x_last,
                   const Matrix& w_a);
/// Mean per-node cross-entropy of the 2-layer MLP head against the
/// cycle-membership indicator.
double ssl_loss_value(const Matrix& node_reps,
                      const std::vector<int>& membership,
                      ModelParams::SslHead& head);

struct Prediction {
  int label = 0;
  std::vector<double> logits;
};
Prediction predict(const ModelConfig& config, ModelParams& params,
                   const GraphInputs& in);

}  // namespace specshift

#endif
