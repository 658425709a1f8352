#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "c2h/diagnostics.hpp"
#include "c2h/evalmetrics.hpp"
#include "c2h/hybrid.hpp"
#include "c2h/pipeline.hpp"
#include "c2h/pls.hpp"
#include "c2h/qsim.hpp"
#include "c2h/selftrain.hpp"
#include "c2h/workflow.hpp"

namespace c2h {

using nlohmann::json;

json to_json(const RealMatrix& m);  // array of rows
RealMatrix matrix_from_json(const json& j);

json to_json(const CircuitSpec& c);
CircuitSpec circuit_from_json(const json& j);

json to_json(const ModelSpec& s);
json to_json(const HybridModel& m);
HybridModel hybrid_model_from_json(const json& j);

json to_json(const PlsModel& m);

json to_json(const TrainingTrace& t);
TrainingTrace trace_from_json(const json& j);

json to_json(const StepRecord& s);
json to_json(const LabelState& s);

/// Flat object with the seven lowercase keys.
json to_json(const DiagnosticsReport& r);
DiagnosticsReport diagnostics_from_json(const json& j);

json to_json(const Contingency& c);
/// Keys a_internal, accuracy, ari, nmi, contingency.
json to_json(const EvaluationReport& r);

json to_json(const Change& c);
json to_json(const WorkflowState& s);

/// Pretty-printed with a trailing newline. Throws std::runtime_error on I/O failure.
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// Two columns: sample, label.
void write_labels_csv(const std::filesystem::path& path, std::span<const int> labels);
std::vector<int> read_labels_csv(const std::filesystem::path& path);

}  // namespace c2h
