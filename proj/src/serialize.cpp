#include "c2h/serialize.hpp"

#include <fstream>
#include <sstream>

namespace c2h {

json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

RealMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("matrix: expected an array of rows");
  std::vector<std::vector<double>> rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return RealMatrix();
  return RealMatrix::from_rows(rows);
}

json to_json(const CircuitSpec& c) {
  json gates = json::array();
  for (const auto& g : c.gates) {
    json jg = {{"kind", to_string(g.kind)}};
    if (g.kind == GateKind::CX) {
      jg["targets"] = {g.control, g.target};
    } else {
      jg["targets"] = {g.target};
      jg["source"] = to_string(g.source);
      jg["slot"] = g.slot;
      jg["scale"] = g.scale;
    }
    gates.push_back(std::move(jg));
  }
  return {{"n_qubits", c.n_qubits}, {"n_features", c.n_features}, {"n_params", c.n_params},
          {"reps", c.reps},         {"entanglement", to_string(c.entanglement)}, {"gates", gates}};
}

CircuitSpec circuit_from_json(const json& j) {
  CircuitSpec c;
  c.n_qubits = j.at("n_qubits").get<int>();
  c.n_features = j.at("n_features").get<int>();
  c.n_params = j.at("n_params").get<int>();
  c.reps = j.at("reps").get<int>();
  c.entanglement = entanglement_from_string(j.at("entanglement").get<std::string>());
  for (const auto& jg : j.at("gates")) {
    const GateKind kind = gate_kind_from_string(jg.at("kind").get<std::string>());
    const auto targets = jg.at("targets").get<std::vector<int>>();
    if (kind == GateKind::CX) {
      if (targets.size() != 2) throw std::runtime_error("circuit: CX needs two targets");
      c.gates.push_back(Gate::cx(targets[0], targets[1]));
    } else {
      if (targets.size() != 1) throw std::runtime_error("circuit: rotation needs one target");
      Gate g{kind, targets[0], -1, angle_source_from_string(jg.at("source").get<std::string>()),
             jg.at("slot").get<int>(), jg.at("scale").get<double>()};
      c.gates.push_back(g);
    }
  }
  c.validate();
  return c;
}

json to_json(const ModelSpec& s) {
  return {{"reps", s.reps},
          {"entanglement", to_string(s.entanglement)},
          {"adapter", s.adapter},
          {"adapter_l2", s.adapter_l2},
          {"head_width", s.head_width},
          {"variant", to_string(s.variant())}};
}

json to_json(const HybridModel& m) {
  json j = {{"variant", to_string(m.variant)},
            {"seed", m.seed},
            {"circuit", to_json(m.circuit)},
            {"theta", m.theta},
            {"adapter_l2", m.adapter_l2},
            {"vocabulary", m.vocabulary}};
  if (m.adapter) {
    j["adapter"] = {{"weights", to_json(m.adapter->weights)},
                    {"bias", m.adapter->bias},
                    {"activation", m.adapter->activation == AdapterActivation::Tanh ? "tanh" : "identity"}};
  } else {
    j["adapter"] = nullptr;
  }
  j["head"] = {{"hidden_weights", to_json(m.head.hidden_weights)},
               {"hidden_bias", m.head.hidden_bias},
               {"output_weights", to_json(m.head.output_weights)},
               {"output_bias", m.head.output_bias}};
  return j;
}

HybridModel hybrid_model_from_json(const json& j) {
  HybridModel m;
  m.variant = variant_from_string(j.at("variant").get<std::string>());
  m.seed = j.at("seed").get<std::uint64_t>();
  m.circuit = circuit_from_json(j.at("circuit"));
  m.theta = j.at("theta").get<std::vector<double>>();
  m.adapter_l2 = j.at("adapter_l2").get<double>();
  m.vocabulary = j.at("vocabulary").get<std::vector<int>>();
  if (!j.at("adapter").is_null()) {
    const auto& a = j.at("adapter");
    AdapterParams p;
    p.weights = matrix_from_json(a.at("weights"));
    p.bias = a.at("bias").get<std::vector<double>>();
    p.activation = a.at("activation").get<std::string>() == "identity" ? AdapterActivation::Identity
                                                                        : AdapterActivation::Tanh;
    m.adapter = std::move(p);
  }
  const auto& h = j.at("head");
  m.head.hidden_weights = matrix_from_json(h.at("hidden_weights"));
  m.head.hidden_bias = h.at("hidden_bias").get<std::vector<double>>();
  m.head.output_weights = matrix_from_json(h.at("output_weights"));
  m.head.output_bias = h.at("output_bias").get<std::vector<double>>();
  m.validate();
  return m;
}

json to_json(const PlsModel& m) {
  return {{"n_components", m.n_components},       {"x_weights", to_json(m.x_weights)},
          {"x_loadings", to_json(m.x_loadings)},   {"y_loadings", to_json(m.y_loadings)},
          {"coefficients", to_json(m.coefficients)}, {"x_mean", m.x_mean},
          {"y_mean", m.y_mean}};
}

json to_json(const TrainingTrace& t) {
  return {{"loss", t.loss},
          {"quantum_grad_norm", t.quantum_grad_norm},
          {"classical_grad_norm", t.classical_grad_norm},
          {"stopped_early", t.stopped_early}};
}

TrainingTrace trace_from_json(const json& j) {
  TrainingTrace t;
  t.loss = j.at("loss").get<std::vector<double>>();
  t.quantum_grad_norm = j.at("quantum_grad_norm").get<std::vector<double>>();
  t.classical_grad_norm = j.at("classical_grad_norm").get<std::vector<double>>();
  t.stopped_early = j.at("stopped_early").get<bool>();
  if (t.quantum_grad_norm.size() != t.loss.size() || t.classical_grad_norm.size() != t.loss.size())
    throw std::runtime_error("trace: per-epoch series differ in length");
  return t;
}

json to_json(const StepRecord& s) {
  return {{"iteration", s.iteration},
          {"changed", s.changed},
          {"agreement_before", s.agreement_before},
          {"agreement_after", s.agreement_after},
          {"attempts", s.attempts}};
}

json to_json(const LabelState& s) {
  json history = json::array();
  for (const auto& h : s.history) history.push_back(to_json(h));
  return {{"iteration", s.iteration}, {"history", history}};
}

json to_json(const DiagnosticsReport& r) {
  return {{"tsi", r.tsi}, {"qgn", r.qgn}, {"bpi", r.bpi}, {"edqfs", r.edqfs},
          {"qos", r.qos}, {"eee", r.eee}, {"qmi", r.qmi}};
}

DiagnosticsReport diagnostics_from_json(const json& j) {
  DiagnosticsReport r;
  r.tsi = j.at("tsi").get<double>();
  r.qgn = j.at("qgn").get<double>();
  r.bpi = j.at("bpi").get<double>();
  r.edqfs = j.at("edqfs").get<double>();
  r.qos = j.at("qos").get<double>();
  r.eee = j.at("eee").get<double>();
  r.qmi = j.at("qmi").get<double>();
  return r;
}

json to_json(const Contingency& c) {
  return {{"learned_ids", c.row_ids}, {"true_ids", c.col_ids}, {"counts", c.counts}, {"total", c.total}};
}

json to_json(const EvaluationReport& r) {
  return {{"a_internal", r.a_internal},
          {"accuracy", r.accuracy},
          {"ari", r.ari},
          {"nmi", r.nmi},
          {"contingency", to_json(r.contingency)}};
}

json to_json(const Change& c) {
  json j = {{"kind", to_string(c.kind)}};
  switch (c.kind) {
    case ChangeKind::SetReps:
      j["reps"] = c.reps;
      j["entanglement"] = to_string(c.entanglement);
      break;
    case ChangeKind::EnableAdapter: j["adapter_l2"] = c.adapter_l2; break;
    case ChangeKind::SetHeadWidth: j["head_width"] = c.head_width; break;
  }
  return j;
}

json to_json(const WorkflowState& s) {
  json rounds = json::array();
  for (const auto& r : s.rounds) {
    json changes = json::array(), pending = json::array(), stages = json::array();
    for (const auto& c : r.changes) changes.push_back(to_json(c));
    for (const auto& c : r.pending) pending.push_back(to_json(c));
    for (const auto& st : r.stages) {
      json js = {{"stage", to_string(st.kind)},
                 {"seed", st.seed},
                 {"iterations", st.state.iteration},
                 {"evaluation", {{"a_internal", st.evaluation.a_internal},
                                 {"accuracy", st.evaluation.accuracy},
                                 {"ari", st.evaluation.ari},
                                 {"nmi", st.evaluation.nmi}}}};
      if (st.spec) js["spec"] = to_json(*st.spec);
      js["diagnostics"] = st.diagnostics ? to_json(*st.diagnostics) : json(nullptr);
      stages.push_back(std::move(js));
    }
    rounds.push_back({{"round", r.round},
                      {"seed", r.seed},
                      {"stages", r.stage_order},
                      {"changes", changes},
                      {"results", stages},
                      {"pending_changes", pending},
                      {"satisfied", r.satisfied}});
  }
  return {{"max_rounds", s.max_rounds}, {"rounds", rounds}, {"satisfied", s.satisfied}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_labels_csv(const std::filesystem::path& path, std::span<const int> labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sample,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

std::vector<int> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "sample,label") throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      if (std::stoul(line.substr(0, comma)) != labels.size()) throw std::invalid_argument("samples out of order");
      labels.push_back(std::stoi(line.substr(comma + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return labels;
}

}  // namespace c2h
