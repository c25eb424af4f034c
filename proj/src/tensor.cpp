#include "specshift/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "specshift/errors.hpp"

namespace specshift {

namespace {

void require_shape(bool ok, const char* op, const std::string& got,
                   const std::string& want) {
  if (!ok)
    throw std::invalid_argument("shape error " + std::string(op) + " " + got +
                                " vs " + want);
}

std::string dims(int r, int c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

std::string Tape::shape_str(const Node* n) {
  return dims(n->value.rows, n->value.cols);
}

Tape::Node* Tape::make_node(int rows, int cols, bool requires_grad) {
  nodes_.push_back(Node{Matrix(rows, cols), Matrix(rows, cols), requires_grad,
                        nullptr});
  return &nodes_.back();
}

void Tape::check_finite(const Node* node, const char* op) const {
  for (double v : node->value.data)
    if (!std::isfinite(v))
      throw NumericError("numeric overflow in " + std::string(op));
}

Tape::Node* Tape::constant(const Matrix& m) {
  Node* n = make_node(m.rows, m.cols, false);
  n->value = m;
  return n;
}

Tape::Node* Tape::parameter(Tensor& t) {
  Node* n = make_node(t.value.rows, t.value.cols, true);
  n->value = t.value;
  n->bound = &t;
  return n;
}

Tape::Node* Tape::matmul(Node* a, Node* b) {
  require_shape(a->value.cols == b->value.rows, "matmul", shape_str(b),
                dims(a->value.cols, b->value.cols));
  const int m = a->value.rows, k = a->value.cols, n = b->value.cols;
  Node* out = make_node(m, n, a->requires_grad || b->requires_grad);
  for (int i = 0; i < m; ++i)
    for (int kk = 0; kk < k; ++kk) {
      const double av = a->value(i, kk);
      if (av == 0.0) continue;
      for (int j = 0; j < n; ++j) out->value(i, j) += av * b->value(kk, j);
    }
  check_finite(out, "matmul");
  steps_.push_back([a, b, out, m, k, n] {
    if (a->requires_grad)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          const double g = out->grad(i, j);
          if (g == 0.0) continue;
          for (int kk = 0; kk < k; ++kk)
            a->grad(i, kk) += g * b->value(kk, j);
        }
    if (b->requires_grad)
      for (int i = 0; i < m; ++i)
        for (int kk = 0; kk < k; ++kk) {
          const double av = a->value(i, kk);
          if (av == 0.0) continue;
          for (int j = 0; j < n; ++j)
            b->grad(kk, j) += av * out->grad(i, j);
        }
  });
  return out;
}

Tape::Node* Tape::add_bias(Node* x, Node* bias) {
  require_shape(bias->value.rows == 1 && bias->value.cols == x->value.cols,
                "add_bias", shape_str(bias), dims(1, x->value.cols));
  Node* out = make_node(x->value.rows, x->value.cols,
                        x->requires_grad || bias->requires_grad);
  for (int i = 0; i < x->value.rows; ++i)
    for (int j = 0; j < x->value.cols; ++j)
      out->value(i, j) = x->value(i, j) + bias->value(0, j);
  check_finite(out, "add_bias");
  steps_.push_back([x, bias, out] {
    if (x->requires_grad)
      for (std::size_t idx = 0; idx < x->grad.data.size(); ++idx)
        x->grad.data[idx] += out->grad.data[idx];
    if (bias->requires_grad)
      for (int i = 0; i < out->grad.rows; ++i)
        for (int j = 0; j < out->grad.cols; ++j)
          bias->grad(0, j) += out->grad(i, j);
  });
  return out;
}

Tape::Node* Tape::relu(Node* x) {
  Node* out = make_node(x->value.rows, x->value.cols, x->requires_grad);
  for (std::size_t i = 0; i < x->value.data.size(); ++i)
    out->value.data[i] = x->value.data[i] > 0.0 ? x->value.data[i] : 0.0;
  check_finite(out, "relu");
  steps_.push_back([x, out] {
    if (!x->requires_grad) return;
    for (std::size_t i = 0; i < x->grad.data.size(); ++i)
      if (x->value.data[i] > 0.0) x->grad.data[i] += out->grad.data[i];
  });
  return out;
}

Tape::Node* Tape::row_softmax(Node* x) {
  Node* out = make_node(x->value.rows, x->value.cols, x->requires_grad);
  for (int i = 0; i < x->value.rows; ++i) {
    double mx = x->value(i, 0);
    for (int j = 1; j < x->value.cols; ++j) mx = std::max(mx, x->value(i, j));
    double sum = 0.0;
    for (int j = 0; j < x->value.cols; ++j)
      sum += out->value(i, j) = std::exp(x->value(i, j) - mx);
    for (int j = 0; j < x->value.cols; ++j) out->value(i, j) /= sum;
  }
  check_finite(out, "row_softmax");
  steps_.push_back([x, out] {
    if (!x->requires_grad) return;
    for (int i = 0; i < x->grad.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < x->grad.cols; ++j)
        dot += out->grad(i, j) * out->value(i, j);
      for (int j = 0; j < x->grad.cols; ++j)
        x->grad(i, j) += out->value(i, j) * (out->grad(i, j) - dot);
    }
  });
  return out;
}

Tape::Node* Tape::global_max_rows(Node* x) {
  require_shape(x->value.rows >= 1, "global_max_rows", shape_str(x),
                "at least one row");
  Node* out = make_node(1, x->value.cols, x->requires_grad);
  auto argmax = std::make_shared<std::vector<int>>(x->value.cols, 0);
  for (int j = 0; j < x->value.cols; ++j) {
    double best = x->value(0, j);
    for (int i = 1; i < x->value.rows; ++i)
      if (x->value(i, j) > best) {  // strict: ties keep the lowest row
        best = x->value(i, j);
        (*argmax)[j] = i;
      }
    out->value(0, j) = best;
  }
  check_finite(out, "global_max_rows");
  steps_.push_back([x, out, argmax] {
    if (!x->requires_grad) return;
    for (int j = 0; j < out->grad.cols; ++j)
      x->grad((*argmax)[j], j) += out->grad(0, j);
  });
  return out;
}

Tape::Node* Tape::global_mean_rows(Node* x) {
  require_shape(x->value.rows >= 1, "global_mean_rows", shape_str(x),
                "at least one row");
  Node* out = make_node(1, x->value.cols, x->requires_grad);
  const double inv = 1.0 / x->value.rows;
  for (int j = 0; j < x->value.cols; ++j) {
    double sum = 0.0;
    for (int i = 0; i < x->value.rows; ++i) sum += x->value(i, j);
    out->value(0, j) = sum * inv;
  }
  check_finite(out, "global_mean_rows");
  steps_.push_back([x, out, inv] {
    if (!x->requires_grad) return;
    for (int i = 0; i < x->grad.rows; ++i)
      for (int j = 0; j < x->grad.cols; ++j)
        x->grad(i, j) += out->grad(0, j) * inv;
  });
  return out;
}

Tape::Node* Tape::scale_rows(Node* x, Node* k) {
  require_shape(k->value.rows == x->value.rows && k->value.cols == 1,
                "scale_rows", shape_str(k), dims(x->value.rows, 1));
  Node* out = make_node(x->value.rows, x->value.cols,
                        x->requires_grad || k->requires_grad);
  for (int i = 0; i < x->value.rows; ++i)
    for (int j = 0; j < x->value.cols; ++j)
      out->value(i, j) = x->value(i, j) * k->value(i, 0);
  check_finite(out, "scale_rows");
  steps_.push_back([x, k, out] {
    if (x->requires_grad)
      for (int i = 0; i < x->grad.rows; ++i)
        for (int j = 0; j < x->grad.cols; ++j)
          x->grad(i, j) += out->grad(i, j) * k->value(i, 0);
    if (k->requires_grad)
      for (int i = 0; i < x->grad.rows; ++i) {
        double dot = 0.0;
        for (int j = 0; j < x->grad.cols; ++j)
          dot += out->grad(i, j) * x->value(i, j);
        k->grad(i, 0) += dot;
      }
  });
  return out;
}

Tape::Node* Tape::size_scaled_softmax(Node* s) {
  require_shape(s->value.cols == 1, "size_scaled_softmax", shape_str(s),
                dims(s->value.rows, 1));
  const int n = s->value.rows;
  Node* out = make_node(n, 1, s->requires_grad);
  double mx = s->value(0, 0);
  for (int i = 1; i < n; ++i) mx = std::max(mx, s->value(i, 0));
  auto softmax = std::make_shared<std::vector<double>>(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += (*softmax)[i] = std::exp(s->value(i, 0) - mx);
  // (e_i * N) / sum: a constant input gives exactly 1 per node.
  for (int i = 0; i < n; ++i)
    out->value(i, 0) = (*softmax)[i] * static_cast<double>(n) / sum;
  for (int i = 0; i < n; ++i) (*softmax)[i] /= sum;
  check_finite(out, "size_scaled_softmax");
  steps_.push_back([s, out, softmax, n] {
    if (!s->requires_grad) return;
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += out->grad(i, 0) * (*softmax)[i];
    for (int i = 0; i < n; ++i)
      s->grad(i, 0) +=
          static_cast<double>(n) * (*softmax)[i] * (out->grad(i, 0) - dot);
  });
  return out;
}

Tape::Node* Tape::cross_entropy_from_logits(Node* logits,
                                            const std::vector<int>& labels) {
  require_shape(static_cast<int>(labels.size()) == logits->value.rows,
                "cross_entropy_from_logits",
                dims(static_cast<int>(labels.size()), 1),
                dims(logits->value.rows, 1));
  const int m = logits->value.rows, c = logits->value.cols;
  for (int i = 0; i < m; ++i)
    if (labels[i] < 0 || labels[i] >= c)
      throw std::invalid_argument("label " + std::to_string(labels[i]) +
                                  " outside [0, " + std::to_string(c) + ")");

  Node* out = make_node(1, 1, logits->requires_grad);
  auto probs = std::make_shared<Matrix>(m, c);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double mx = logits->value(i, 0);
    for (int j = 1; j < c; ++j) mx = std::max(mx, logits->value(i, j));
    double sum = 0.0;
    for (int j = 0; j < c; ++j)
      sum += (*probs)(i, j) = std::exp(logits->value(i, j) - mx);
    for (int j = 0; j < c; ++j) (*probs)(i, j) /= sum;
    total += std::log(sum) + mx - logits->value(i, labels[i]);
  }
  out->value(0, 0) = total / m;
  check_finite(out, "cross_entropy_from_logits");
  auto labels_copy = std::make_shared<std::vector<int>>(labels);
  steps_.push_back([logits, out, probs, labels_copy, m, c] {
    if (!logits->requires_grad) return;
    const double g = out->grad(0, 0) / m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < c; ++j)
        logits->grad(i, j) +=
            g * ((*probs)(i, j) - (j == (*labels_copy)[i] ? 1.0 : 0.0));
  });
  return out;
}

Tape::Node* Tape::add(Node* a, Node* b) {
  require_shape(a->value.same_shape(b->value), "add", shape_str(b),
                shape_str(a));
  Node* out = make_node(a->value.rows, a->value.cols,
                        a->requires_grad || b->requires_grad);
  for (std::size_t i = 0; i < a->value.data.size(); ++i)
    out->value.data[i] = a->value.data[i] + b->value.data[i];
  check_finite(out, "add");
  steps_.push_back([a, b, out] {
    if (a->requires_grad)
      for (std::size_t i = 0; i < a->grad.data.size(); ++i)
        a->grad.data[i] += out->grad.data[i];
    if (b->requires_grad)
      for (std::size_t i = 0; i < b->grad.data.size(); ++i)
        b->grad.data[i] += out->grad.data[i];
  });
  return out;
}

Tape::Node* Tape::scale(Node* a, double factor) {
  Node* out = make_node(a->value.rows, a->value.cols, a->requires_grad);
  for (std::size_t i = 0; i < a->value.data.size(); ++i)
    out->value.data[i] = a->value.data[i] * factor;
  check_finite(out, "scale");
  steps_.push_back([a, out, factor] {
    if (!a->requires_grad) return;
    for (std::size_t i = 0; i < a->grad.data.size(); ++i)
      a->grad.data[i] += out->grad.data[i] * factor;
  });
  return out;
}

void Tape::backward(Node* loss, double seed) {
  if (backward_done_)
    throw std::logic_error("tape backward already performed");
  backward_done_ = true;
  require_shape(loss->value.rows == 1 && loss->value.cols == 1, "backward",
                shape_str(loss), "1x1");
  loss->grad(0, 0) = seed;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  for (auto& node : nodes_)
    if (node.bound)
      for (std::size_t i = 0; i < node.grad.data.size(); ++i)
        node.bound->grad.data[i] += node.grad.data[i];
}

Adam::Adam(std::vector<Tensor*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (const Tensor* t : params_) {
    m_.emplace_back(t->value.rows, t->value.cols);
    v_.emplace_back(t->value.rows, t->value.cols);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params_.size(); ++p) {
    Tensor& t = *params_[p];
    for (std::size_t i = 0; i < t.value.data.size(); ++i) {
      const double g = t.grad.data[i];
      double& m = m_[p].data[i];
      double& v = v_[p].data[i];
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      t.value.data[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

Matrix glorot_init(int rows, int cols, Rng& rng) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("glorot_init requires positive dimensions");
  const double bound = std::sqrt(6.0 / (rows + cols));
  Matrix m(rows, cols);
  for (auto& x : m.data) x = bound * (2.0 * rng.unit_real() - 1.0);
  return m;
}

double gradcheck(const std::function<double()>& loss_fn,
                 const std::vector<Tensor*>& params, double h) {
  for (Tensor* t : params) t->zero_grad();
  loss_fn();
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (const Tensor* t : params) analytic.push_back(t->grad);

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->value.data.size(); ++i) {
      double& x = params[p]->value.data[i];
      const double saved = x;
      x = saved + h;
      const double up = loss_fn();
      x = saved - h;
      const double down = loss_fn();
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[p].data[i];
      const double err =
          std::abs(a - numeric) /
          std::max({1.0, std::abs(a), std::abs(numeric)});
      worst = std::max(worst, err);
    }
  }
  for (std::size_t p = 0; p < params.size(); ++p) params[p]->grad = analytic[p];
  return worst;
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ofstream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

constexpr char kMagic[4] = {'S', 'S', 'N', 'T'};

}  // namespace

void save_tensors(const std::vector<const Tensor*>& tensors,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path.string());
  out.write(kMagic, 4);
  put_u32(out, 1);  // format version
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    put_u32(out, static_cast<std::uint32_t>(t->value.rows));
    put_u32(out, static_cast<std::uint32_t>(t->value.cols));
  }
  for (const Tensor* t : tensors)
    for (double x : t->value.data) put_f64(out, x);
}

std::vector<Matrix> load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dataset file missing: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad parameter file magic: " + path.string());
  const std::uint32_t version = get_u32(in);
  if (version != 1)
    throw DataError("unsupported parameter file version " +
                    std::to_string(version));
  const std::uint32_t count = get_u32(in);
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const int rows = static_cast<int>(get_u32(in));
    const int cols = static_cast<int>(get_u32(in));
    out.emplace_back(rows, cols);
  }
  for (auto& m : out)
    for (auto& x : m.data) x = get_f64(in);
  if (!in) throw DataError("truncated parameter file: " + path.string());
  return out;
}

}  // namespace specshift
