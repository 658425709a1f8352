#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "c2h/config.hpp"
#include "c2h/diagnostics.hpp"
#include "c2h/pipeline.hpp"

namespace c2h {

enum class ChangeKind { SetReps, EnableAdapter, SetHeadWidth };
std::string to_string(ChangeKind k);

/// One architecture modification.
struct Change {
  ChangeKind kind = ChangeKind::SetReps;
  int reps = 0;
  Entanglement entanglement = Entanglement::Circular;
  double adapter_l2 = 0.0;
  std::size_t head_width = 0;

  std::string describe() const;
  bool operator==(const Change&) const = default;
};

enum class Comparator { Less, Greater };

/// "metric comparator threshold" triggers `change`.
struct RefinementRule {
  std::string metric;  // one of the seven lowercase diagnostic keys
  Comparator comparator = Comparator::Less;
  double threshold = 0.0;
  Change change;

  bool fires(const DiagnosticsReport& report) const;
  std::string describe() const;
};

double metric_value(const DiagnosticsReport& report, const std::string& metric);

std::vector<RefinementRule> default_rules(const WorkflowSettings& s = {});

/// Changes of every firing rule, one per change kind (the last firing rule of
/// a kind wins), ordered by kind.
std::vector<Change> evaluate_rules(const DiagnosticsReport& report, const std::vector<RefinementRule>& rules);

ModelSpec apply_changes(ModelSpec spec, const std::vector<Change>& changes);

struct RoundRecord {
  std::size_t round = 0;
  std::uint64_t seed = 0;
  std::vector<Change> changes;            // applied before this round's training
  std::vector<std::string> stage_order;   // stages executed in this round
  std::vector<StageResult> stages;        // same order; the last one is the round's model
  std::vector<Change> pending;            // rules firing on this round's diagnostics
  bool satisfied = false;

  const StageResult& result() const { return stages.back(); }
};

struct WorkflowState {
  std::size_t max_rounds = 0;
  std::vector<RoundRecord> rounds;
  bool satisfied = false;
};

/// Satisfaction test of the loop: accuracy (or internal consistency without
/// ground truth) at the target, and no rule firing.
bool is_satisfied(const StageResult& result, const std::vector<Change>& pending, const WorkflowSettings& s);

/// Called after every finished round, e.g. to persist it.
using RoundCallback = std::function<void(const RoundRecord&)>;

/// Classical baseline, minimal hybrid, diagnose, modify, refined hybrid,
/// evaluate; then diagnose/modify/retrain until satisfied or out of rounds.
WorkflowState run_workflow(const PreparedData& data, const RunConfig& cfg, const RoundCallback& on_round = {});

}  // namespace c2h
