#include "specshift/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "specshift/errors.hpp"

namespace specshift {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

Backbone parse_backbone(const std::string& v) {
  if (v == "gcn") return Backbone::gcn;
  if (v == "mlp") return Backbone::mlp;
  throw DataError("unknown backbone: " + v);
}

Readout parse_readout(const std::string& v) {
  if (v == "global_max") return Readout::global_max;
  if (v == "global_mean") return Readout::global_mean;
  if (v == "sia") return Readout::sia;
  throw DataError("unknown readout: " + v);
}

const char* backbone_name(Backbone b) {
  return b == Backbone::gcn ? "gcn" : "mlp";
}

const char* readout_name(Readout r) {
  switch (r) {
    case Readout::global_max: return "global_max";
    case Readout::global_mean: return "global_mean";
    case Readout::sia: return "sia";
  }
  return "global_max";
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  RunConfig out;
  std::optional<int> augcyc_n, augcyc_r;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(line_no) +
                      " is not key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "backbone")
        out.model.backbone = parse_backbone(value);
      else if (key == "layers")
        out.model.layers = std::stoi(value);
      else if (key == "hidden")
        out.model.hidden = std::stoi(value);
      else if (key == "readout")
        out.model.readout = parse_readout(value);
      else if (key == "ssl_lambda")
        out.model.ssl_lambda = std::stod(value);
      else if (key == "augcyc_n")
        augcyc_n = std::stoi(value);
      else if (key == "augcyc_r")
        augcyc_r = std::stoi(value);
      else if (key == "lr")
        out.model.learning_rate = std::stod(value);
      else if (key == "batch_size")
        out.model.batch_size = std::stoi(value);
      else if (key == "max_epochs")
        out.model.max_epochs = std::stoi(value);
      else if (key == "patience")
        out.model.patience = std::stoi(value);
      else if (key.rfind("upsample.", 0) == 0) {
        const int cls = std::stoi(key.substr(9));
        const auto colon = value.find(':');
        if (colon == std::string::npos)
          throw DataError("upsample value must be fraction:ratio");
        out.upsample[cls] = {std::stod(value.substr(0, colon)),
                             std::stoi(value.substr(colon + 1))};
      } else {
        throw DataError("unknown config key: " + key);
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception&) {
      throw DataError("unparsable config value at line " +
                      std::to_string(line_no) + ": " + line);
    }
  }
  if (augcyc_n.has_value() != augcyc_r.has_value())
    throw DataError("augcyc_n and augcyc_r must be given together");
  if (augcyc_n) {
    if (*augcyc_n < 1 || *augcyc_r < 1)
      throw DataError("augcyc_n and augcyc_r must be positive");
    out.model.augcyc = AugCycConfig{*augcyc_n, *augcyc_r};
  }
  if (out.model.hidden < 1) throw DataError("hidden width must be >= 1");
  if (out.model.layers < 1) throw DataError("layer count must be >= 1");
  if (out.model.ssl_lambda < 0.0)
    throw DataError("ssl_lambda must be nonnegative");
  return out;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset file missing: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

std::string format_run_config(const RunConfig& config) {
  std::ostringstream out;
  const auto& m = config.model;
  out << "backbone = " << backbone_name(m.backbone) << '\n'
      << "layers = " << m.layers << '\n'
      << "hidden = " << m.hidden << '\n'
      << "readout = " << readout_name(m.readout) << '\n'
      << "ssl_lambda = " << m.ssl_lambda << '\n';
  if (m.augcyc)
    out << "augcyc_n = " << m.augcyc->increments << '\n'
        << "augcyc_r = " << m.augcyc->skip_ratio << '\n';
  out << "lr = " << m.learning_rate << '\n'
      << "batch_size = " << m.batch_size << '\n'
      << "max_epochs = " << m.max_epochs << '\n'
      << "patience = " << m.patience << '\n';
  for (const auto& [cls, entry] : config.upsample)
    out << "upsample." << cls << " = " << entry.fraction << ':' << entry.ratio
        << '\n';
  return out.str();
}

std::vector<Tensor*> ModelParams::all() {
  std::vector<Tensor*> out;
  for (auto& t : conv) out.push_back(&t);
  out.push_back(&cls_w);
  out.push_back(&cls_b);
  if (sia_w) out.push_back(&*sia_w);
  if (ssl) {
    out.push_back(&ssl->w1);
    out.push_back(&ssl->b1);
    out.push_back(&ssl->w2);
    out.push_back(&ssl->b2);
  }
  return out;
}

std::vector<const Tensor*> ModelParams::all() const {
  auto list = const_cast<ModelParams*>(this)->all();
  return {list.begin(), list.end()};
}

void ModelParams::zero_grads() {
  for (Tensor* t : all()) t->zero_grad();
}

std::vector<Matrix> ModelParams::snapshot_values() const {
  std::vector<Matrix> out;
  for (const Tensor* t : all()) out.push_back(t->value);
  return out;
}

void ModelParams::restore_values(const std::vector<Matrix>& snapshot) {
  auto list = all();
  if (snapshot.size() != list.size())
    throw DataError("parameter snapshot size mismatch");
  for (std::size_t i = 0; i < list.size(); ++i) list[i]->value = snapshot[i];
}

ModelParams init_params(const ModelConfig& config, int input_width,
                        int class_count, Rng& rng) {
  if (input_width < 1) throw DataError("input width must be >= 1");
  if (class_count < 2) throw DataError("class count must be >= 2");
  ModelParams p;
  int width = input_width;
  for (int l = 0; l < config.layers; ++l) {
    p.conv.emplace_back(Tensor(glorot_init(width, config.hidden, rng)));
    width = config.hidden;
  }
  p.cls_w = Tensor(glorot_init(width, class_count, rng));
  p.cls_b = Tensor(1, class_count);
  if (config.readout == Readout::sia)
    p.sia_w = Tensor(glorot_init(2, 1, rng));
  if (config.ssl_lambda > 0.0) {
    ModelParams::SslHead head{Tensor(glorot_init(width, config.hidden, rng)),
                              Tensor(1, config.hidden),
                              Tensor(glorot_init(config.hidden, 2, rng)),
                              Tensor(1, 2)};
    p.ssl = std::move(head);
  }
  return p;
}

void save_params(const ModelParams& params,
                 const std::filesystem::path& path) {
  save_tensors(params.all(), path);
}

void load_params(ModelParams& params, const std::filesystem::path& path) {
  const auto loaded = load_tensors(path);
  auto list = params.all();
  if (loaded.size() != list.size())
    throw DataError("parameter file tensor count mismatch: " + path.string());
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!loaded[i].same_shape(list[i]->value))
      throw DataError("parameter tensor shape mismatch at index " +
                      std::to_string(i));
    list[i]->value = loaded[i];
  }
}

GraphInputs prepare_graph(const Graph& g, const ModelConfig& config) {
  GraphInputs in;
  in.node_count = g.node_count();
  in.label = g.label().value_or(0);
  if (g.features()) {
    in.features = *g.features();
  } else {
    in.features = Matrix(g.node_count(), 1, 1.0);
  }
  if (config.backbone == Backbone::gcn)
    in.propagation = normalized_adjacency(g).matrix();
  if (config.needs_cycles()) {
    in.cycle_features = node_cycle_features(g);
    in.cycle_membership.resize(g.node_count());
    for (int v = 0; v < g.node_count(); ++v)
      in.cycle_membership[v] = in.cycle_features(v, 0) > 0.0 ? 1 : 0;
  }
  return in;
}

std::vector<GraphInputs> prepare_dataset(const Dataset& d,
                                         const ModelConfig& config) {
  std::vector<GraphInputs> out;
  out.reserve(d.graphs.size());
  for (const auto& g : d.graphs) out.push_back(prepare_graph(g, config));
  return out;
}

ForwardNodes build_forward(Tape& tape, const ModelConfig& config,
                           ModelParams& params, const GraphInputs& in) {
  if (in.node_count < 1) throw DataError("empty graph readout");
  Tape::Node* x = tape.constant(in.features);
  Tape::Node* t = config.backbone == Backbone::gcn
                      ? tape.constant(in.propagation)
                      : nullptr;
  for (int l = 0; l < config.layers; ++l) {
    x = tape.matmul(x, tape.parameter(params.conv[l]));
    if (t) x = tape.matmul(t, x);
    if (l + 1 < config.layers) x = tape.relu(x);
  }

  Tape::Node* pooled = nullptr;
  switch (config.readout) {
    case Readout::global_max:
      pooled = tape.global_max_rows(x);
      break;
    case Readout::global_mean:
      pooled = tape.global_mean_rows(x);
      break;
    case Readout::sia: {
      Tape::Node* scores =
          tape.matmul(tape.constant(in.cycle_features),
                      tape.parameter(*params.sia_w));
      Tape::Node* attention = tape.size_scaled_softmax(scores);
      pooled = tape.global_max_rows(tape.scale_rows(x, attention));
      break;
    }
  }
  ForwardNodes out;
  out.node_reps = x;
  out.logits = tape.add_bias(tape.matmul(pooled, tape.parameter(params.cls_w)),
                             tape.parameter(params.cls_b));
  return out;
}

Tape::Node* build_loss(Tape& tape, const ModelConfig& config,
                       ModelParams& params, const GraphInputs& in,
                       const ForwardNodes& fwd) {
  Tape::Node* loss = tape.cross_entropy_from_logits(fwd.logits, {in.label});
  if (config.ssl_lambda > 0.0) {
    Tape::Node* hidden = tape.relu(tape.add_bias(
        tape.matmul(fwd.node_reps, tape.parameter(params.ssl->w1)),
        tape.parameter(params.ssl->b1)));
    Tape::Node* ssl_logits = tape.add_bias(
        tape.matmul(hidden, tape.parameter(params.ssl->w2)),
        tape.parameter(params.ssl->b2));
    Tape::Node* cycle_loss =
        tape.cross_entropy_from_logits(ssl_logits, in.cycle_membership);
    loss = tape.add(loss, tape.scale(cycle_loss, config.ssl_lambda));
  }
  return loss;
}

Matrix backbone_forward(const ModelConfig& config, ModelParams& params,
                        const Graph& g, const Matrix& x0) {
  GraphInputs in;
  in.node_count = g.node_count();
  in.features = x0;
  if (config.backbone == Backbone::gcn)
    in.propagation = normalized_adjacency(g).matrix();

  Tape tape;
  Tape::Node* x = tape.constant(in.features);
  Tape::Node* t = config.backbone == Backbone::gcn
                      ? tape.constant(in.propagation)
                      : nullptr;
  for (int l = 0; l < config.layers; ++l) {
    x = tape.matmul(x, tape.parameter(params.conv[l]));
    if (t) x = tape.matmul(t, x);
    if (l + 1 < config.layers) x = tape.relu(x);
  }
  return x->value;
}

Matrix sia_readout(const Matrix& cycle_features, const Matrix& x_last,
                   const Matrix& w_a) {
  if (x_last.rows < 1) throw DataError("empty graph readout");
  if (cycle_features.rows != x_last.rows)
    throw DataError("cycle feature rows must match representation rows");
  Tape tape;
  Tensor w(w_a);
  Tape::Node* scores =
      tape.matmul(tape.constant(cycle_features), tape.parameter(w));
  Tape::Node* attention = tape.size_scaled_softmax(scores);
  Tape::Node* pooled =
      tape.global_max_rows(tape.scale_rows(tape.constant(x_last), attention));
  return pooled->value;
}

double ssl_loss_value(const Matrix& node_reps,
                      const std::vector<int>& membership,
                      ModelParams::SslHead& head) {
  Tape tape;
  Tape::Node* hidden = tape.relu(
      tape.add_bias(tape.matmul(tape.constant(node_reps),
                                tape.parameter(head.w1)),
                    tape.parameter(head.b1)));
  Tape::Node* logits = tape.add_bias(
      tape.matmul(hidden, tape.parameter(head.w2)), tape.parameter(head.b2));
  return tape.cross_entropy_from_logits(logits, membership)->value(0, 0);
}

Prediction predict(const ModelConfig& config, ModelParams& params,
                   const GraphInputs& in) {
  Tape tape;
  const ForwardNodes fwd = build_forward(tape, config, params, in);
  Prediction out;
  out.logits.assign(fwd.logits->value.data.begin(),
                    fwd.logits->value.data.end());
  out.label = 0;
  for (std::size_t c = 1; c < out.logits.size(); ++c)
    if (out.logits[c] > out.logits[out.label])
      out.label = static_cast<int>(c);
  return out;
}

}  // namespace specshift
