#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "c2h/numerics.hpp"
#include "c2h/pls.hpp"

namespace c2h {

/// Anything the label-refinement loop can drive. Implementations must be
/// deterministic given their seed.
class Predictor {
 public:
  virtual ~Predictor() = default;

  /// Trains on all samples with the given labels.
  virtual void fit(const RealMatrix& x, std::span<const int> labels) = 0;

  /// Out-of-fold predictions for `labels`. Stateful predictors keep the
  /// resulting fold models as a pending candidate until `commit`.
  virtual LabelPredictions cross_val_predict(const RealMatrix& x, std::span<const int> labels) = 0;

  /// Adopts the fold models from the most recent `cross_val_predict`.
  virtual void commit() {}

  /// Predictions of the model last trained by `fit`.
  virtual LabelPredictions predict(const RealMatrix& x) const = 0;
};

/// PLS regression on one-hot labels with shuffled k-fold prediction.
class PlsPredictor final : public Predictor {
 public:
  PlsPredictor(std::size_t n_components, std::size_t folds, std::uint64_t seed)
      : n_components_(n_components), folds_(folds), seed_(seed) {}

  void fit(const RealMatrix& x, std::span<const int> labels) override;
  LabelPredictions cross_val_predict(const RealMatrix& x, std::span<const int> labels) override;
  LabelPredictions predict(const RealMatrix& x) const override;

  const PlsModel& model() const;
  const std::vector<int>& vocabulary() const { return vocabulary_; }

 private:
  std::size_t n_components_;
  std::size_t folds_;
  std::uint64_t seed_;
  PlsModel model_;
  std::vector<int> vocabulary_;
  bool fitted_ = false;
};

struct StepRecord {
  std::size_t iteration = 0;
  std::vector<std::size_t> changed;  // sample ids relabeled in this step
  double agreement_before = 0.0;
  double agreement_after = 0.0;      // equals agreement_before when nothing changed
  int attempts = 0;                  // candidate batches evaluated
};

struct LabelState {
  std::vector<int> labels;
  std::size_t iteration = 0;
  std::vector<StepRecord> history;
};

struct SelfTrainConfig {
  std::size_t max_iterations = 20;
  double batch_fraction = 0.1;
};

/// Raised when the predictor fails; carries the iteration at which it happened.
class SelfTrainError : public std::runtime_error {
 public:
  SelfTrainError(std::size_t iteration, const std::string& what)
      : std::runtime_error("self-training iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Labels 0..N-1, one class per sample.
LabelState init_labels(std::size_t n);

/// Fraction of samples whose predicted label equals their current label.
double agreement(std::span<const int> labels, std::span<const int> predicted);

/// One refinement step. Only samples whose out-of-fold prediction disagrees
/// with their label are eligible; the ceil(batch_fraction * N) most confident
/// of them form a candidate batch. The batch is kept iff out-of-fold agreement
/// on the relabeled data does not drop, otherwise its more confident half is
/// tried once before giving up for this step.
LabelState step(const LabelState& state, Predictor& predictor, const RealMatrix& x,
                const SelfTrainConfig& cfg = {});

/// Steps until `max_iterations` or the first step that changes nothing.
LabelState run(LabelState state, Predictor& predictor, const RealMatrix& x, const SelfTrainConfig& cfg = {});

}  // namespace c2h
