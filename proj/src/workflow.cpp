#include "c2h/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace c2h {

std::string to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::SetReps: return "set_reps";
    case ChangeKind::EnableAdapter: return "enable_adapter";
    case ChangeKind::SetHeadWidth: return "set_head_width";
  }
  return "?";
}

std::string Change::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ChangeKind::SetReps: os << "reps=" << reps << " entanglement=" << to_string(entanglement); break;
    case ChangeKind::EnableAdapter: os << "adapter=on l2=" << adapter_l2; break;
    case ChangeKind::SetHeadWidth: os << "head_width=" << head_width; break;
  }
  return os.str();
}

double metric_value(const DiagnosticsReport& r, const std::string& metric) {
  if (metric == "tsi") return r.tsi;
  if (metric == "qgn") return r.qgn;
  if (metric == "bpi") return r.bpi;
  if (metric == "edqfs") return r.edqfs;
  if (metric == "qos") return r.qos;
  if (metric == "eee") return r.eee;
  if (metric == "qmi") return r.qmi;
  throw ContractViolation("unknown diagnostic '" + metric + "'");
}

bool RefinementRule::fires(const DiagnosticsReport& report) const {
  const double v = metric_value(report, metric);
  return comparator == Comparator::Less ? v < threshold : v > threshold;
}

std::string RefinementRule::describe() const {
  std::ostringstream os;
  os << metric << (comparator == Comparator::Less ? " < " : " > ") << threshold << " -> " << change.describe();
  return os.str();
}

std::vector<RefinementRule> default_rules(const WorkflowSettings& s) {
  std::vector<RefinementRule> rules(3);
  rules[0] = {"eee", Comparator::Less, s.eee_below, {}};
  rules[0].change.kind = ChangeKind::SetReps;
  rules[0].change.reps = s.reps;
  rules[0].change.entanglement = Entanglement::Circular;
  rules[1] = {"edqfs", Comparator::Greater, s.edqfs_above, {}};
  rules[1].change.kind = ChangeKind::EnableAdapter;
  rules[1].change.adapter_l2 = s.adapter_l2;
  rules[2] = {"qos", Comparator::Less, s.qos_below, {}};
  rules[2].change.kind = ChangeKind::SetHeadWidth;
  rules[2].change.head_width = s.head_width;
  for (const auto& r : rules)
    if (!std::isfinite(r.threshold)) throw ContractViolation("rule threshold must be finite");
  return rules;
}

std::vector<Change> evaluate_rules(const DiagnosticsReport& report, const std::vector<RefinementRule>& rules) {
  std::vector<std::optional<Change>> by_kind(3);
  for (const auto& rule : rules)
    if (rule.fires(report)) by_kind[static_cast<std::size_t>(rule.change.kind)] = rule.change;
  std::vector<Change> out;
  for (const auto& c : by_kind)
    if (c) out.push_back(*c);
  return out;
}

ModelSpec apply_changes(ModelSpec spec, const std::vector<Change>& changes) {
  for (const auto& c : changes) {
    switch (c.kind) {
      case ChangeKind::SetReps:
        if (c.reps < 1) throw ContractViolation("apply_changes: reps must be >= 1");
        spec.reps = c.reps;
        spec.entanglement = c.entanglement;
        break;
      case ChangeKind::EnableAdapter:
        spec.adapter = true;
        spec.adapter_l2 = c.adapter_l2;
        break;
      case ChangeKind::SetHeadWidth:
        if (c.head_width < 1) throw ContractViolation("apply_changes: head width must be >= 1");
        spec.head_width = c.head_width;
        break;
    }
  }
  return spec;
}

bool is_satisfied(const StageResult& result, const std::vector<Change>& pending, const WorkflowSettings& s) {
  const double score = s.use_ground_truth ? result.evaluation.accuracy : result.evaluation.a_internal;
  return score >= s.target_accuracy && pending.empty();
}

WorkflowState run_workflow(const PreparedData& data, const RunConfig& cfg, const RoundCallback& on_round) {
  cfg.validate();
  const auto rules = default_rules(cfg.workflow);
  WorkflowState state;
  state.max_rounds = cfg.workflow.max_rounds;

  // Round seeds come from one stream so reruns are reproducible.
  std::uint64_t stream = cfg.seed;
  ModelSpec spec = cfg.minimal_spec();
  std::vector<Change> pending;

  std::vector<int> classical_labels;
  for (std::size_t round = 1; round <= cfg.workflow.max_rounds; ++round) {
    RoundRecord rec;
    rec.round = round;
    if (round == 1) {
      rec.stages.push_back(run_classical(data, cfg, cfg.seed));
      rec.stage_order.push_back(to_string(StageKind::Classical));
      classical_labels = rec.stages.back().state.labels;
      const std::vector<int>* start = cfg.inherit_labels ? &classical_labels : nullptr;
      rec.stages.push_back(run_hybrid(data, cfg, spec, StageKind::QuantumFast, cfg.seed, start));
      rec.stage_order.push_back(to_string(StageKind::QuantumFast));
      pending = evaluate_rules(*rec.stages.back().diagnostics, rules);
    }
    rec.seed = splitmix64(stream);
    rec.changes = pending;
    spec = apply_changes(spec, pending);
    const std::vector<int>* start = cfg.inherit_labels ? &classical_labels : nullptr;
    rec.stages.push_back(run_hybrid(data, cfg, spec, StageKind::HybridPlus, rec.seed, start));
    rec.stage_order.push_back(to_string(StageKind::HybridPlus));
    rec.pending = evaluate_rules(*rec.result().diagnostics, rules);
    rec.satisfied = is_satisfied(rec.result(), rec.pending, cfg.workflow);
    pending = rec.pending;
    state.satisfied = rec.satisfied;
    state.rounds.push_back(std::move(rec));
    if (on_round) on_round(state.rounds.back());
    if (state.satisfied) break;
  }
  return state;
}

}  // namespace c2h
