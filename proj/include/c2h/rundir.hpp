#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "c2h/config.hpp"
#include "c2h/diagnostics.hpp"
#include "c2h/pipeline.hpp"
#include "c2h/workflow.hpp"

namespace c2h {

namespace fs = std::filesystem;

/// config.json (effective settings) and meta.json (the only file holding a
/// timestamp) at the root of a run directory.
void write_run_root(const fs::path& dir, const RunConfig& cfg, const std::string& command);

/// summary.json, model.json, trace.json, evaluation.json, labels.csv, and for
/// hybrid stages initial_model.json and diagnostics.json.
void write_stage_dir(const fs::path& dir, const StageResult& result);

/// workflow.json plus round_<i>/ directories. Round 1 keeps its classical and
/// quantum-fast stages in subdirectories; the round's refined model sits at the
/// round root.
void write_round_dir(const fs::path& root, const RoundRecord& round);
void write_workflow_summary(const fs::path& root, const WorkflowState& state);

/// Nearest config.json at or above `run_dir` (at most three levels up).
fs::path find_config(const fs::path& run_dir);
RunConfig load_run_config(const fs::path& run_dir);

/// Recomputes the diagnostics of a hybrid run directory from its artifacts.
/// Throws MissingArtifact naming the absent file.
DiagnosticsReport rediagnose(const fs::path& run_dir);

struct RunSummary {
  fs::path dir;
  std::string name;
  std::string stage;
  nlohmann::json evaluation;
  nlohmann::json diagnostics;  // null for the classical stage
  std::vector<int> labels;
};

RunSummary load_run_summary(const fs::path& run_dir);

/// Writes report.csv and report.json; with `svg`, one scatter panel per run over
/// the first two principal components plus a ground-truth panel. Returns the
/// written file paths.
std::vector<fs::path> write_report(const std::vector<fs::path>& runs, const fs::path& out, bool svg);

/// Self-contained SVG scatter plot; colors follow the rank of each label among
/// the distinct labels.
std::string scatter_svg(const std::string& title, std::span<const double> xs, std::span<const double> ys,
                        std::span<const int> labels);

}  // namespace c2h
