#include "c2h/selftrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "c2h/data.hpp"

namespace c2h {

void PlsPredictor::fit(const RealMatrix& x, std::span<const int> labels) {
  vocabulary_ = vocabulary_of(labels);
  const std::size_t c = std::min(n_components_, std::min(x.cols(), x.rows() - 1));
  model_ = pls_fit(x, one_hot(labels, vocabulary_), c);
  fitted_ = true;
}

LabelPredictions PlsPredictor::cross_val_predict(const RealMatrix& x, std::span<const int> labels) {
  return c2h::cross_val_predict(x, labels, CvPlan::make(x.rows(), folds_, seed_), n_components_);
}

const PlsModel& PlsPredictor::model() const {
  if (!fitted_) throw std::logic_error("PlsPredictor::model called before fit");
  return model_;
}

LabelPredictions PlsPredictor::predict(const RealMatrix& x) const {
  if (!fitted_) throw std::logic_error("PlsPredictor::predict called before fit");
  const RealMatrix scores = pls_predict(model_, x);
  LabelPredictions out;
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const std::size_t best = argmax(scores.row(r));
    out.labels.push_back(vocabulary_[best]);
    out.confidence.push_back(scores(r, best));
  }
  return out;
}

LabelState init_labels(std::size_t n) {
  if (n == 0) throw ContractViolation("init_labels: need at least one sample");
  LabelState state;
  state.labels.resize(n);
  std::iota(state.labels.begin(), state.labels.end(), 0);
  return state;
}

double agreement(std::span<const int> labels, std::span<const int> predicted) {
  if (labels.size() != predicted.size()) throw ContractViolation("agreement: length mismatch");
  if (labels.empty()) return 0.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) same += labels[i] == predicted[i];
  return static_cast<double>(same) / static_cast<double>(labels.size());
}

LabelState step(const LabelState& state, Predictor& predictor, const RealMatrix& x, const SelfTrainConfig& cfg) {
  const std::size_t n = state.labels.size();
  if (x.rows() != n) throw ContractViolation("step: feature rows do not match label count");
  const std::size_t iteration = state.iteration + 1;

  LabelState next = state;
  next.iteration = iteration;
  StepRecord record;
  record.iteration = iteration;

  try {
    const LabelPredictions current = predictor.cross_val_predict(x, state.labels);
    predictor.commit();
    record.agreement_before = agreement(state.labels, current.labels);
    record.agreement_after = record.agreement_before;

    std::vector<std::size_t> mismatched;
    for (std::size_t i = 0; i < n; ++i)
      if (current.labels[i] != state.labels[i]) mismatched.push_back(i);
    std::stable_sort(mismatched.begin(), mismatched.end(), [&](std::size_t a, std::size_t b) {
      return current.confidence[a] > current.confidence[b];
    });

    const auto budget = static_cast<std::size_t>(std::ceil(cfg.batch_fraction * static_cast<double>(n) - 1e-9));
    std::size_t batch = std::min(budget, mismatched.size());
    while (batch > 0) {
      ++record.attempts;
      std::vector<int> candidate = state.labels;
      for (std::size_t j = 0; j < batch; ++j) candidate[mismatched[j]] = current.labels[mismatched[j]];
      const LabelPredictions refit = predictor.cross_val_predict(x, candidate);
      const double after = agreement(candidate, refit.labels);
      if (after >= record.agreement_before) {
        predictor.commit();
        next.labels = std::move(candidate);
        record.agreement_after = after;
        record.changed.assign(mismatched.begin(), mismatched.begin() + static_cast<std::ptrdiff_t>(batch));
        std::sort(record.changed.begin(), record.changed.end());
        break;
      }
      if (record.attempts >= 2) break;
      batch /= 2;
    }
  } catch (const SelfTrainError&) {
    throw;
  } catch (const std::exception& e) {
    throw SelfTrainError(iteration, e.what());
  }

  next.history.push_back(std::move(record));
  return next;
}

LabelState run(LabelState state, Predictor& predictor, const RealMatrix& x, const SelfTrainConfig& cfg) {
  if (cfg.max_iterations == 0) throw ContractViolation("run: max_iterations must be at least 1");
  while (state.iteration < cfg.max_iterations) {
    state = step(state, predictor, x, cfg);
    if (state.history.back().changed.empty()) break;
  }
  return state;
}

}  // namespace c2h
