#ifndef SPECSHIFT_TENSOR_HPP
#define SPECSHIFT_TENSOR_HPP

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <vector>

#include "specshift/matrix.hpp"
#include "specshift/rng.hpp"

namespace specshift {

/// Parameter tensor: value plus a gradient buffer of identical shape.
struct Tensor {
  Matrix value;
  Matrix grad;

  Tensor() = default;
  Tensor(int rows, int cols) : value(rows, cols), grad(rows, cols) {}
  explicit Tensor(Matrix v) : value(std::move(v)) {
    grad = Matrix(value.rows, value.cols);
  }

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

/// Recorded-operation tape for one forward pass. Every op stores enough
/// context to produce exact analytic input gradients; backward() replays
/// the record in reverse and accumulates into the bound parameter tensors.
/// A tape belongs to one logical training thread.
class Tape {
 public:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Tensor* bound = nullptr;
  };

  /// Leaf with no gradient (input features, propagation matrices).
  Node* constant(const Matrix& m);
  /// Leaf bound to a parameter; backward() accumulates into `t.grad`.
  Node* parameter(Tensor& t);

  Node* matmul(Node* a, Node* b);
  Node* add_bias(Node* x, Node* bias);  // bias is 1 x cols, broadcast by row
  Node* relu(Node* x);
  Node* row_softmax(Node* x);  // row max subtracted before exponentiation
  Node* global_max_rows(Node* x);   // gradient to argmax rows, lowest index
  Node* global_mean_rows(Node* x);
  Node* scale_rows(Node* x, Node* k);  // Diag(k) * x, k is rows x 1
  /// k = softmax(s) * N over a column vector s of length N, computed as
  /// (exp(s_i - max) * N) / sum so that a constant s yields exactly 1.
  Node* size_scaled_softmax(Node* s);
  /// Mean over rows of (logsumexp(row) - row[label]); value is 1 x 1.
  Node* cross_entropy_from_logits(Node* logits, const std::vector<int>& labels);
  Node* add(Node* a, Node* b);
  Node* scale(Node* a, double factor);

  /// Reverse sweep from a 1 x 1 loss node, seeding its gradient with
  /// `seed` (1/batch_size gives averaged batch gradients directly).
  void backward(Node* loss, double seed = 1.0);

 private:
  Node* make_node(int rows, int cols, bool requires_grad);
  void check_finite(const Node* node, const char* op) const;
  static std::string shape_str(const Node* n);

  std::deque<Node> nodes_;
  std::vector<std::function<void()>> steps_;
  bool backward_done_ = false;
};

/// Adam with bias-corrected moments; the paper's optimizer settings are
/// the defaults (no gradient clipping).
struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(std::vector<Tensor*> params, AdamConfig cfg = {});

  /// One update from the gradients currently stored on the parameters.
  void step();
  std::int64_t steps_taken() const { return t_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<Matrix> m_, v_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
};

/// Uniform Glorot initialization on [-sqrt(6/(rows+cols)), +...], filled
/// in row-major order from the given stream.
Matrix glorot_init(int rows, int cols, Rng& rng);

/// Central finite differences against the analytic gradients produced by
/// `loss_fn` (which recomputes the loss and fills parameter grads on every
/// call). Returns max over coordinates of |a - n| / max(1, |a|, |n|).
double gradcheck(const std::function<double()>& loss_fn,
                 const std::vector<Tensor*>& params, double h = 1e-5);

/// Flat binary parameter file: magic "SSNT", version, tensor count, shape
/// table, then all entries as little-endian 64-bit floats.
void save_tensors(const std::vector<const Tensor*>& tensors,
                  const std::filesystem::path& path);
std::vector<Matrix> load_tensors(const std::filesystem::path& path);

}  // namespace specshift

#endif
