#include "c2h/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "c2h/data.hpp"

namespace c2h {

namespace {

constexpr std::size_t kInputDim = 4;

double activate(AdapterActivation a, double v) { return a == AdapterActivation::Tanh ? std::tanh(v) : v; }

std::size_t adapter_param_count(const HybridModel& m) {
  return m.adapter ? m.adapter->weights.data().size() + m.adapter->bias.size() : 0;
}

void softmax_in_place(std::vector<double>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

struct HeadActivations {
  std::vector<double> hidden;
  std::vector<double> probabilities;
};

HeadActivations head_forward(const HeadParams& head, const Readout& q) {
  HeadActivations a;
  const std::size_t width = head.width();
  a.hidden.resize(width);
  for (std::size_t h = 0; h < width; ++h) {
    double s = head.hidden_bias[h];
    for (std::size_t o = 0; o < kReadoutSize; ++o) s += head.hidden_weights(h, o) * q[o];
    a.hidden[h] = std::tanh(s);
  }
  a.probabilities.resize(head.outputs());
  for (std::size_t l = 0; l < head.outputs(); ++l) {
    double s = head.output_bias[l];
    const auto w = head.output_weights.row(l);
    for (std::size_t h = 0; h < width; ++h) s += w[h] * a.hidden[h];
    a.probabilities[l] = s;
  }
  softmax_in_place(a.probabilities);
  return a;
}

std::vector<std::size_t> label_targets(const HybridModel& model, std::span<const int> labels) {
  std::vector<std::size_t> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::lower_bound(model.vocabulary.begin(), model.vocabulary.end(), labels[i]);
    if (it == model.vocabulary.end() || *it != labels[i])
      throw ContractViolation("train: label " + std::to_string(labels[i]) + " is not in the model vocabulary");
    targets[i] = static_cast<std::size_t>(it - model.vocabulary.begin());
  }
  return targets;
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::Minimal ? "minimal" : "refined"; }

Variant variant_from_string(const std::string& s) {
  if (s == "minimal") return Variant::Minimal;
  if (s == "refined") return Variant::Refined;
  throw ContractViolation("unknown model variant '" + s + "'");
}

ModelSpec ModelSpec::minimal() { return ModelSpec{}; }

ModelSpec ModelSpec::refined(int reps, double adapter_l2, std::size_t head_width) {
  ModelSpec s;
  s.reps = reps;
  s.entanglement = Entanglement::Circular;
  s.adapter = true;
  s.adapter_l2 = adapter_l2;
  s.head_width = head_width;
  return s;
}

CircuitSpec ModelSpec::circuit() const {
  return reps == 0 ? build_minimal_circuit() : build_refined_circuit(reps, entanglement);
}

void HybridModel::validate() const {
  circuit.validate();
  if (theta.size() != static_cast<std::size_t>(circuit.n_params))
    throw ContractViolation("model: theta has " + std::to_string(theta.size()) + " entries, circuit needs " +
                            std::to_string(circuit.n_params));
  if (circuit.n_features != static_cast<int>(kInputDim)) throw ContractViolation("model: circuit must read 4 features");
  if (variant == Variant::Minimal && adapter) throw ContractViolation("model: minimal variant cannot carry an adapter");
  if (adapter && (adapter->weights.rows() != kInputDim || adapter->weights.cols() != kInputDim ||
                  adapter->bias.size() != kInputDim))
    throw ContractViolation("model: adapter must be 4x4 with a 4-vector bias");
  if (head.hidden_weights.cols() != kReadoutSize || head.hidden_bias.size() != head.width() ||
      head.output_weights.cols() != head.width() || head.output_bias.size() != head.outputs())
    throw ContractViolation("model: inconsistent head shapes");
  if (head.outputs() != vocabulary.size()) throw ContractViolation("model: head outputs do not match vocabulary");
  if (!std::is_sorted(vocabulary.begin(), vocabulary.end())) throw ContractViolation("model: vocabulary not sorted");
}

void TrainConfig::validate() const {
  if (!(lr_quantum > 0 && lr_classical > 0 && clip > 0 && epochs > 0 && patience > 0))
    throw ContractViolation("train config: learning rates, clip, epochs and patience must be positive");
  if (!(beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1)) throw ContractViolation("train config: betas must be in (0,1)");
  if (patience > epochs) throw ContractViolation("train config: patience exceeds epochs");
}

void reset_head(HybridModel& model, std::vector<int> vocabulary, SeededRng& rng) {
  const std::size_t width = model.head.width() > 0 ? model.head.width() : 8;
  HeadParams head;
  head.hidden_weights = RealMatrix(width, kReadoutSize);
  for (double& w : head.hidden_weights.data()) w = rng.gaussian() / std::sqrt(static_cast<double>(kReadoutSize));
  head.hidden_bias.assign(width, 0.0);
  head.output_weights = RealMatrix(vocabulary.size(), width);
  for (double& w : head.output_weights.data()) w = rng.gaussian() / std::sqrt(static_cast<double>(width));
  head.output_bias.assign(vocabulary.size(), 0.0);
  model.head = std::move(head);
  model.vocabulary = std::move(vocabulary);
}

HybridModel make_model(const ModelSpec& spec, std::vector<int> vocabulary, std::uint64_t seed) {
  if (spec.head_width == 0) throw ContractViolation("model: head width must be positive");
  if (vocabulary.empty()) throw ContractViolation("model: empty label vocabulary");
  std::sort(vocabulary.begin(), vocabulary.end());
  HybridModel m;
  m.variant = spec.variant();
  m.circuit = spec.circuit();
  m.seed = seed;
  m.adapter_l2 = spec.adapter ? spec.adapter_l2 : 0.0;
  SeededRng rng(seed);
  m.theta.resize(static_cast<std::size_t>(m.circuit.n_params));
  for (double& t : m.theta) t = rng.uniform(-M_PI / 8.0, M_PI / 8.0);
  if (spec.adapter) {
    AdapterParams a;
    a.weights = RealMatrix(kInputDim, kInputDim);
    for (double& w : a.weights.data()) w = rng.gaussian() / std::sqrt(static_cast<double>(kInputDim));
    a.bias.assign(kInputDim, 0.0);
    m.adapter = std::move(a);
  }
  m.head.hidden_weights = RealMatrix(spec.head_width, kReadoutSize);
  reset_head(m, std::move(vocabulary), rng);
  return m;
}

std::vector<double> encode_input(const HybridModel& model, std::span<const double> x) {
  if (x.size() != kInputDim)
    throw ContractViolation("model input must have 4 features, got " + std::to_string(x.size()));
  std::vector<double> z(x.begin(), x.end());
  if (!model.adapter) return z;
  const AdapterParams& a = *model.adapter;
  for (std::size_t i = 0; i < kInputDim; ++i) {
    double s = a.bias[i];
    for (std::size_t j = 0; j < kInputDim; ++j) s += a.weights(i, j) * x[j];
    z[i] = activate(a.activation, s);
  }
  return z;
}

Readout quantum_features(const HybridModel& model, std::span<const double> x) {
  const auto z = encode_input(model, x);
  return readout(run_circuit(model.circuit, z, model.theta));
}

RealMatrix quantum_features(const HybridModel& model, const RealMatrix& x) {
  RealMatrix out(x.rows(), kReadoutSize);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const Readout q = quantum_features(model, x.row(r));
    std::copy(q.begin(), q.end(), out.row(r).begin());
  }
  return out;
}

std::vector<double> forward(const HybridModel& model, std::span<const double> x) {
  return head_forward(model.head, quantum_features(model, x)).probabilities;
}

std::size_t quantum_param_count(const HybridModel& model) { return model.theta.size(); }

std::vector<double> flatten_params(const HybridModel& model) {
  std::vector<double> flat(model.theta);
  if (model.adapter) {
    flat.insert(flat.end(), model.adapter->weights.data().begin(), model.adapter->weights.data().end());
    flat.insert(flat.end(), model.adapter->bias.begin(), model.adapter->bias.end());
  }
  const HeadParams& h = model.head;
  flat.insert(flat.end(), h.hidden_weights.data().begin(), h.hidden_weights.data().end());
  flat.insert(flat.end(), h.hidden_bias.begin(), h.hidden_bias.end());
  flat.insert(flat.end(), h.output_weights.data().begin(), h.output_weights.data().end());
  flat.insert(flat.end(), h.output_bias.begin(), h.output_bias.end());
  return flat;
}

void unflatten_params(HybridModel& model, std::span<const double> flat) {
  auto it = flat.begin();
  auto take = [&](auto& dst) {
    if (static_cast<std::size_t>(flat.end() - it) < dst.size())
      throw ContractViolation("unflatten_params: vector too short");
    std::copy_n(it, dst.size(), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(model.theta);
  if (model.adapter) {
    take(model.adapter->weights.data());
    take(model.adapter->bias);
  }
  take(model.head.hidden_weights.data());
  take(model.head.hidden_bias);
  take(model.head.output_weights.data());
  take(model.head.output_bias);
  if (it != flat.end()) throw ContractViolation("unflatten_params: vector too long");
}

LossGradient loss_and_gradient(const HybridModel& model, const RealMatrix& x, std::span<const std::size_t> targets) {
  if (x.rows() != targets.size()) throw ContractViolation("loss_and_gradient: target count mismatch");
  if (x.rows() == 0) throw ContractViolation("loss_and_gradient: empty batch");
  const std::size_t n_theta = model.theta.size();
  const std::size_t n_adapter = adapter_param_count(model);
  const HeadParams& head = model.head;
  const std::size_t width = head.width();
  const std::size_t outputs = head.outputs();

  LossGradient out;
  out.gradient.assign(n_theta + n_adapter + head.hidden_weights.data().size() + width +
                          head.output_weights.data().size() + outputs,
                      0.0);
  double* g_theta = out.gradient.data();
  double* g_aw = g_theta + n_theta;
  double* g_ab = g_aw + (model.adapter ? kInputDim * kInputDim : 0);
  double* g_w1 = g_theta + n_theta + n_adapter;
  double* g_b1 = g_w1 + head.hidden_weights.data().size();
  double* g_w2 = g_b1 + width;
  double* g_b2 = g_w2 + head.output_weights.data().size();

  const double inv_n = 1.0 / static_cast<double>(x.rows());
  std::vector<double> d_hidden(width), d_pre(width);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    const auto z = encode_input(model, xr);
    const ReadoutJacobian jac = readout_jacobian(model.circuit, z, model.theta, model.adapter.has_value());
    const HeadActivations act = head_forward(head, jac.values);
    const std::size_t t = targets[r];
    if (t >= outputs) throw ContractViolation("loss_and_gradient: target index out of range");
    out.loss -= std::log(std::max(act.probabilities[t], 1e-300)) * inv_n;

    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t l = 0; l < outputs; ++l) {
      const double d_logit = (act.probabilities[l] - (l == t ? 1.0 : 0.0)) * inv_n;
      g_b2[l] += d_logit;
      double* w2_grad = g_w2 + l * width;
      const auto w2 = head.output_weights.row(l);
      for (std::size_t h = 0; h < width; ++h) {
        w2_grad[h] += d_logit * act.hidden[h];
        d_hidden[h] += d_logit * w2[h];
      }
    }
    Readout d_q{0.0, 0.0, 0.0};
    for (std::size_t h = 0; h < width; ++h) {
      d_pre[h] = d_hidden[h] * (1.0 - act.hidden[h] * act.hidden[h]);
      g_b1[h] += d_pre[h];
      for (std::size_t o = 0; o < kReadoutSize; ++o) {
        g_w1[h * kReadoutSize + o] += d_pre[h] * jac.values[o];
        d_q[o] += d_pre[h] * head.hidden_weights(h, o);
      }
    }
    for (std::size_t j = 0; j < n_theta; ++j)
      for (std::size_t o = 0; o < kReadoutSize; ++o) g_theta[j] += d_q[o] * jac.d_params[j][o];

    if (model.adapter) {
      const AdapterParams& a = *model.adapter;
      for (std::size_t i = 0; i < kInputDim; ++i) {
        double d_z = 0.0;
        for (std::size_t o = 0; o < kReadoutSize; ++o) d_z += d_q[o] * jac.d_features[i][o];
        const double d_s = a.activation == AdapterActivation::Tanh ? d_z * (1.0 - z[i] * z[i]) : d_z;
        g_ab[i] += d_s;
        for (std::size_t j = 0; j < kInputDim; ++j) g_aw[i * kInputDim + j] += d_s * xr[j];
      }
    }
  }

  if (model.adapter && model.adapter_l2 > 0.0) {
    const auto& w = model.adapter->weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      out.loss += model.adapter_l2 * w[i] * w[i];
      g_aw[i] += 2.0 * model.adapter_l2 * w[i];
    }
  }
  return out;
}

double clip_gradient(std::span<double> grad, double threshold) {
  const double norm = l2_norm(grad);
  if (norm <= threshold || norm == 0.0) return 1.0;
  const double factor = threshold / norm;
  for (double& g : grad) g *= factor;
  return factor;
}

TrainResult train(HybridModel model, const RealMatrix& x, std::span<const int> labels, const TrainConfig& cfg) {
  cfg.validate();
  model.validate();
  if (labels.size() != x.rows()) throw ContractViolation("train: label count mismatch");
  const auto targets = label_targets(model, labels);

  std::vector<double> params = flatten_params(model);
  const std::size_t n_theta = quantum_param_count(model);
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  TrainingTrace trace;
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    unflatten_params(model, params);
    LossGradient lg = loss_and_gradient(model, x, targets);
    if (!std::isfinite(lg.loss))
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1));
    trace.loss.push_back(lg.loss);
    trace.quantum_grad_norm.push_back(l2_norm(std::span<const double>(lg.gradient).first(n_theta)));
    trace.classical_grad_norm.push_back(l2_norm(std::span<const double>(lg.gradient).subspan(n_theta)));

    if (lg.loss < best - cfg.min_improvement) {
      best = lg.loss;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      trace.stopped_early = true;
      break;
    }

    clip_gradient(lg.gradient, cfg.clip);
    const double t = static_cast<double>(epoch + 1);
    const double bias1 = 1.0 - std::pow(cfg.beta1, t);
    const double bias2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = lg.gradient[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double lr = i < n_theta ? cfg.lr_quantum : cfg.lr_classical;
      params[i] -= lr * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + cfg.adam_epsilon);
    }
  }
  unflatten_params(model, params);
  return {std::move(model), std::move(trace)};
}

LabelPredictions predict_labels(const HybridModel& model, const RealMatrix& x) {
  LabelPredictions out;
  out.labels.reserve(x.rows());
  out.confidence.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto p = forward(model, x.row(r));
    const std::size_t best = argmax(p);
    out.labels.push_back(model.vocabulary[best]);
    out.confidence.push_back(p[best]);
  }
  return out;
}

// ---------------------------------------------------------------------------

HybridPredictor::HybridPredictor(ModelSpec spec, TrainConfig cfg, std::size_t folds, std::uint64_t seed,
                                 bool fixed_vocabulary)
    : spec_(spec), cfg_(cfg), folds_(folds), seed_(seed), fixed_vocabulary_(fixed_vocabulary) {
  cfg_.validate();
  if (folds_ < 2) throw ContractViolation("HybridPredictor: need at least 2 folds");
}

std::vector<int> HybridPredictor::vocabulary_for(std::span<const int> labels) const {
  if (!fixed_vocabulary_) return vocabulary_of(labels);
  std::vector<int> all(n_);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

void HybridPredictor::ensure_initialized(std::size_t n) {
  if (n_ == n) return;
  if (n_ != 0) throw ContractViolation("HybridPredictor: sample count changed between calls");
  n_ = n;
  plan_ = CvPlan::make(n, folds_, seed_);
  std::uint64_t stream = seed_;
  std::vector<int> initial(n);
  std::iota(initial.begin(), initial.end(), 0);
  auto make_slot = [&] {
    const std::uint64_t model_seed = splitmix64(stream);
    return Slot{make_model(spec_, initial, model_seed), SeededRng(splitmix64(stream))};
  };
  full_ = make_slot();
  initial_ = full_->model;
  committed_.clear();
  for (std::size_t k = 0; k < folds_; ++k) committed_.push_back(make_slot());
}

void HybridPredictor::train_slot(Slot& slot, const RealMatrix& x, std::span<const int> labels,
                                 TrainingTrace* trace) const {
  auto vocab = vocabulary_for(labels);
  if (vocab != slot.model.vocabulary) {
    reset_head(slot.model, std::move(vocab), slot.rng);
  }
  TrainResult result = train(std::move(slot.model), x, labels, cfg_);
  slot.model = std::move(result.model);
  if (trace != nullptr) *trace = std::move(result.trace);
}

void HybridPredictor::fit(const RealMatrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) throw ContractViolation("HybridPredictor::fit: label count mismatch");
  ensure_initialized(x.rows());
  train_slot(*full_, x, labels, &trace_);
}

LabelPredictions HybridPredictor::cross_val_predict(const RealMatrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) throw ContractViolation("HybridPredictor: label count mismatch");
  ensure_initialized(x.rows());
  if (has_committed_ && std::equal(labels.begin(), labels.end(), committed_labels_.begin(), committed_labels_.end())) {
    pending_ = committed_;
    pending_labels_ = committed_labels_;
    pending_predictions_ = committed_predictions_;
    return pending_predictions_;
  }

  pending_ = committed_;
  pending_labels_.assign(labels.begin(), labels.end());
  pending_predictions_ = LabelPredictions{std::vector<int>(n_, -1), std::vector<double>(n_, 0.0)};
  for (std::size_t fold = 0; fold < folds_; ++fold) {
    const auto train_rows = plan_.train_indices(fold);
    const auto test_rows = plan_.test_indices(fold);
    if (test_rows.empty()) throw ContractViolation("HybridPredictor: empty fold " + std::to_string(fold));
    std::vector<int> train_labels;
    train_labels.reserve(train_rows.size());
    for (std::size_t i : train_rows) train_labels.push_back(labels[i]);
    train_slot(pending_[fold], x.select_rows(train_rows), train_labels, nullptr);
    const LabelPredictions held_out = predict_labels(pending_[fold].model, x.select_rows(test_rows));
    for (std::size_t j = 0; j < test_rows.size(); ++j) {
      pending_predictions_.labels[test_rows[j]] = held_out.labels[j];
      pending_predictions_.confidence[test_rows[j]] = held_out.confidence[j];
    }
  }
  return pending_predictions_;
}

void HybridPredictor::commit() {
  if (pending_.empty()) return;
  committed_ = pending_;
  committed_labels_ = pending_labels_;
  committed_predictions_ = pending_predictions_;
  has_committed_ = true;
}

LabelPredictions HybridPredictor::predict(const RealMatrix& x) const { return predict_labels(model(), x); }

const HybridModel& HybridPredictor::model() const {
  if (!full_) throw std::logic_error("HybridPredictor: no model has been trained");
  return full_->model;
}

const HybridModel& HybridPredictor::initial_model() const {
  if (!initial_) throw std::logic_error("HybridPredictor: not initialized");
  return *initial_;
}

}  // namespace c2h
