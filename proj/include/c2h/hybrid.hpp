#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "c2h/numerics.hpp"
#include "c2h/pls.hpp"
#include "c2h/qsim.hpp"
#include "c2h/selftrain.hpp"

namespace c2h {

enum class Variant { Minimal, Refined };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

enum class AdapterActivation { Tanh, Identity };

/// h(x) = act(W x + b), 4 -> 4.
struct AdapterParams {
  RealMatrix weights;  // 4 x 4
  std::vector<double> bias;
  AdapterActivation activation = AdapterActivation::Tanh;  // Identity exists for tests only
};

/// g(q) = softmax(W2 tanh(W1 q + b1) + b2).
struct HeadParams {
  RealMatrix hidden_weights;  // H x 3
  std::vector<double> hidden_bias;
  RealMatrix output_weights;  // L x H
  std::vector<double> output_bias;

  std::size_t width() const { return hidden_weights.rows(); }
  std::size_t outputs() const { return output_weights.rows(); }
};

/// Architecture knobs the refinement rules act on.
struct ModelSpec {
  int reps = 0;  // 0 selects the minimal single-block ansatz
  Entanglement entanglement = Entanglement::Linear;
  bool adapter = false;
  double adapter_l2 = 0.0;
  std::size_t head_width = 8;

  static ModelSpec minimal();
  static ModelSpec refined(int reps = 3, double adapter_l2 = 1e-3, std::size_t head_width = 16);
  Variant variant() const { return reps == 0 && !adapter ? Variant::Minimal : Variant::Refined; }
  CircuitSpec circuit() const;
  bool operator==(const ModelSpec&) const = default;
};

struct HybridModel {
  Variant variant = Variant::Minimal;
  CircuitSpec circuit;
  std::vector<double> theta;
  std::optional<AdapterParams> adapter;
  HeadParams head;
  std::vector<int> vocabulary;  // label id for each head output
  double adapter_l2 = 0.0;
  std::uint64_t seed = 0;

  /// Throws ContractViolation when shapes disagree.
  void validate() const;
};

struct TrainConfig {
  double lr_quantum = 0.05;
  double lr_classical = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 60;
  std::size_t patience = 10;
  double clip = 1.0;
  double min_improvement = 1e-5;

  void validate() const;
};

struct TrainingTrace {
  std::vector<double> loss;
  std::vector<double> quantum_grad_norm;
  std::vector<double> classical_grad_norm;
  bool stopped_early = false;

  std::size_t epochs() const { return loss.size(); }
};

/// Fresh model: theta ~ U(-pi/8, pi/8); weights N(0, 1/fan_in); zero biases.
HybridModel make_model(const ModelSpec& spec, std::vector<int> vocabulary, std::uint64_t seed);

/// Replaces the head with a newly initialized one over `vocabulary`.
void reset_head(HybridModel& model, std::vector<int> vocabulary, SeededRng& rng);

/// Circuit input for a PCA-space sample: the sample itself, or the adapter output.
std::vector<double> encode_input(const HybridModel& model, std::span<const double> x);

Readout quantum_features(const HybridModel& model, std::span<const double> x);
RealMatrix quantum_features(const HybridModel& model, const RealMatrix& x);

/// Class probabilities over `model.vocabulary`.
std::vector<double> forward(const HybridModel& model, std::span<const double> x);

// Flattened parameter vector: [theta | adapter weights, adapter bias |
// hidden weights, hidden bias, output weights, output bias].
std::vector<double> flatten_params(const HybridModel& model);
void unflatten_params(HybridModel& model, std::span<const double> flat);
std::size_t quantum_param_count(const HybridModel& model);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // flattened layout
};

/// Mean cross-entropy plus adapter_l2 * ||adapter weights||^2 and its exact
/// gradient (shift rule through the circuit, backprop elsewhere).
LossGradient loss_and_gradient(const HybridModel& model, const RealMatrix& x, std::span<const std::size_t> targets);

/// Rescales `grad` in place so its L2 norm is at most `threshold`; returns the factor applied.
double clip_gradient(std::span<double> grad, double threshold);

struct TrainResult {
  HybridModel model;
  TrainingTrace trace;
};

/// Full-batch Adam training on labels drawn from `model.vocabulary`.
TrainResult train(HybridModel model, const RealMatrix& x, std::span<const int> labels, const TrainConfig& cfg);

LabelPredictions predict_labels(const HybridModel& model, const RealMatrix& x);

/// Self-training adapter. Each fold keeps its own model so a fold model never
/// trains on its held-out samples; circuit and adapter parameters persist
/// across refinement steps, and a head is re-drawn from the fold's stream when
/// its training vocabulary changes.
class HybridPredictor final : public Predictor {
 public:
  HybridPredictor(ModelSpec spec, TrainConfig cfg, std::size_t folds, std::uint64_t seed,
                  bool fixed_vocabulary = false);

  void fit(const RealMatrix& x, std::span<const int> labels) override;
  LabelPredictions cross_val_predict(const RealMatrix& x, std::span<const int> labels) override;
  void commit() override;
  LabelPredictions predict(const RealMatrix& x) const override;

  const HybridModel& model() const;
  const TrainingTrace& trace() const { return trace_; }
  const ModelSpec& spec() const { return spec_; }
  /// Untrained model as first drawn for the full-data slot.
  const HybridModel& initial_model() const;

 private:
  struct Slot {
    HybridModel model;
    SeededRng rng;
  };

  void ensure_initialized(std::size_t n);
  std::vector<int> vocabulary_for(std::span<const int> labels) const;
  void train_slot(Slot& slot, const RealMatrix& x, std::span<const int> labels, TrainingTrace* trace) const;

  ModelSpec spec_;
  TrainConfig cfg_;
  std::size_t folds_;
  std::uint64_t seed_;
  bool fixed_vocabulary_;

  std::size_t n_ = 0;
  CvPlan plan_;
  std::vector<Slot> committed_;
  std::vector<Slot> pending_;
  std::vector<int> committed_labels_;
  std::vector<int> pending_labels_;
  LabelPredictions committed_predictions_;
  LabelPredictions pending_predictions_;
  bool has_committed_ = false;

  std::optional<Slot> full_;
  std::optional<HybridModel> initial_;
  TrainingTrace trace_;
};

}  // namespace c2h
