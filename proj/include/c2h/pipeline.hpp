#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "c2h/config.hpp"
#include "c2h/data.hpp"
#include "c2h/diagnostics.hpp"
#include "c2h/evalmetrics.hpp"
#include "c2h/hybrid.hpp"
#include "c2h/pls.hpp"
#include "c2h/selftrain.hpp"

namespace c2h {

enum class StageKind { Classical, QuantumFast, HybridPlus };
std::string to_string(StageKind k);
/// Throws ConfigError for unknown names.
StageKind stage_from_string(const std::string& s);

/// A failure inside a stage, prefixed with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Dataset plus the model inputs derived from it: standardize, PCA to four
/// components, then per-column scaling.
struct PreparedData {
  Dataset dataset;
  PcaModel pca;
  RealMatrix pca_scores;  // unscaled, used for plotting
  RealMatrix x;           // model input
};

PreparedData prepare_data(const RunConfig& cfg);
PreparedData prepare_data(const Dataset& dataset, InputScaling scaling);

struct StageResult {
  StageKind kind = StageKind::Classical;
  std::uint64_t seed = 0;
  LabelState state;
  std::vector<int> predictions;  // final model on all samples
  EvaluationReport evaluation;

  std::optional<PlsModel> pls;              // classical only
  std::optional<ModelSpec> spec;            // hybrid only
  std::optional<HybridModel> model;
  std::optional<HybridModel> initial_model;
  std::optional<TrainingTrace> trace;
  std::optional<DiagnosticsReport> diagnostics;
};

StageResult run_classical(const PreparedData& data, const RunConfig& cfg, std::uint64_t seed);

/// Self-training with a hybrid predictor of architecture `spec`, then a final
/// full-data fit, evaluation and diagnostics. Starts from index labels unless
/// `start_labels` is given.
StageResult run_hybrid(const PreparedData& data, const RunConfig& cfg, const ModelSpec& spec, StageKind kind,
                       std::uint64_t seed, const std::vector<int>* start_labels = nullptr);

/// Runs a stage with the configured default architecture. Hybrid stages
/// inherit the classical labels when `cfg.inherit_labels` is set.
StageResult run_stage(StageKind kind, const PreparedData& data, const RunConfig& cfg);

/// Seed for the plateau probe, derived from the run seed.
std::uint64_t bpi_seed(std::uint64_t run_seed);

}  // namespace c2h
