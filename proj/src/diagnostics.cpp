#include "c2h/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "c2h/data.hpp"

namespace c2h {

const std::map<std::string, std::string>& DiagnosticsReport::formulas() {
  static const std::map<std::string, std::string> table = {
      {"tsi", "fraction of epoch pairs with loss[t+1] <= loss[t] * (1 + 1e-3)"},
      {"qgn", "mean over epochs of ||dL/dtheta||_2"},
      {"bpi", "population variance over 32 draws theta ~ U(-pi/8, pi/8) of d<Z0 Z1>/d theta_0 at the first sample"},
      {"edqfs", "(sum eig)^2 / sum eig^2 of the quantum feature covariance, eig < 1e-12 set to 0"},
      {"qos", "trace(S_between) / trace(S_within) of quantum features under current labels, capped at 1e6"},
      {"eee", "mean over samples of S(rho_q0) in bits"},
      {"qmi", "mean over samples of S(q0) + S(q1) - S(q0 q1) in bits"},
  };
  return table;
}

double tsi(const TrainingTrace& trace) {
  if (trace.loss.size() < 2) throw ContractViolation("tsi: need at least 2 epochs");
  std::size_t stable = 0;
  for (std::size_t t = 0; t + 1 < trace.loss.size(); ++t)
    stable += trace.loss[t + 1] <= trace.loss[t] * (1.0 + 1e-3);
  return static_cast<double>(stable) / static_cast<double>(trace.loss.size() - 1);
}

double qgn(const TrainingTrace& trace) {
  if (trace.quantum_grad_norm.empty()) throw ContractViolation("qgn: empty trace");
  double s = 0.0;
  for (double g : trace.quantum_grad_norm) s += g;
  return s / static_cast<double>(trace.quantum_grad_norm.size());
}

double bpi(const CircuitSpec& circuit, std::span<const double> sample, std::size_t inits, std::uint64_t seed) {
  if (inits < 2) throw ContractViolation("bpi: need at least 2 initializations");
  if (circuit.n_params == 0) return 0.0;
  const Observable zz = Observable::single(std::string("ZZ") + std::string(static_cast<std::size_t>(circuit.n_qubits - 2), 'I'));
  SeededRng rng(seed);
  std::vector<double> theta(static_cast<std::size_t>(circuit.n_params));
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < inits; ++r) {
    for (double& t : theta) t = rng.uniform(-M_PI / 8.0, M_PI / 8.0);
    const double g = param_shift_grad(circuit, sample, theta, zz, 0);
    // Welford update
    const double delta = g - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (g - mean);
  }
  return m2 / static_cast<double>(inits);
}

double edqfs(const RealMatrix& features) {
  if (features.rows() < 2) throw ContractViolation("edqfs: need at least 2 samples");
  const auto values = sym_eigen(covariance(features)).values;
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    const double l = v < 1e-12 ? 0.0 : v;
    sum += l;
    sum_sq += l * l;
  }
  if (sum_sq == 0.0) return 1.0;
  return sum * sum / sum_sq;
}

double qos(const RealMatrix& features, std::span<const int> labels) {
  if (features.rows() != labels.size()) throw ContractViolation("qos: label count mismatch");
  const auto classes = vocabulary_of(labels);
  if (classes.size() < 2) throw ContractViolation("qos: need at least 2 classes");
  const std::size_t d = features.cols();
  const std::size_t k = classes.size();
  std::vector<double> grand(d, 0.0);
  std::vector<std::vector<double>> centroid(k, std::vector<double>(d, 0.0));
  std::vector<double> count(k, 0.0);
  auto class_of = [&](int label) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
  };
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const std::size_t c = class_of(labels[r]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      centroid[c][j] += features(r, j);
      grand[j] += features(r, j);
    }
  }
  for (std::size_t j = 0; j < d; ++j) grand[j] /= static_cast<double>(features.rows());
  for (std::size_t c = 0; c < k; ++c)
    for (double& v : centroid[c]) v /= count[c];

  double between = 0.0, within = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) between += count[c] * (centroid[c][j] - grand[j]) * (centroid[c][j] - grand[j]);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto& mu = centroid[class_of(labels[r])];
    for (std::size_t j = 0; j < d; ++j) within += (features(r, j) - mu[j]) * (features(r, j) - mu[j]);
  }
  if (within < 1e-12) return kQosCap;
  return std::min(between / within, kQosCap);
}

double eee(const HybridModel& model, const RealMatrix& x) {
  if (x.rows() == 0) throw ContractViolation("eee: no samples");
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto state = run_circuit(model.circuit, encode_input(model, x.row(r)), model.theta);
    total += von_neumann_entropy(reduced_density(state, 0));
  }
  return total / static_cast<double>(x.rows());
}

double qmi(const HybridModel& model, const RealMatrix& x) {
  if (x.rows() == 0) throw ContractViolation("qmi: no samples");
  const int part_a[1] = {0};
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto state = run_circuit(model.circuit, encode_input(model, x.row(r)), model.theta);
    total += mutual_information(state, part_a);
  }
  return total / static_cast<double>(x.rows());
}

DiagnosticsReport diagnose(const DiagnosticInputs& in) {
  if (in.trace == nullptr) throw MissingArtifact("diagnose: training trace is missing");
  if (in.model == nullptr) throw MissingArtifact("diagnose: trained model is missing");
  if (in.initial_model == nullptr) throw MissingArtifact("diagnose: initial model is missing");
  if (in.x == nullptr) throw MissingArtifact("diagnose: input features are missing");
  if (in.labels == nullptr) throw MissingArtifact("diagnose: label assignment is missing");

  DiagnosticsReport report;
  report.tsi = tsi(*in.trace);
  report.qgn = qgn(*in.trace);
  const auto probe = encode_input(*in.initial_model, in.x->row(0));
  report.bpi = bpi(in.initial_model->circuit, probe, in.bpi_inits, in.seed);
  const RealMatrix features = quantum_features(*in.model, *in.x);
  report.edqfs = edqfs(features);
  report.qos = vocabulary_of(*in.labels).size() >= 2 ? qos(features, *in.labels) : 0.0;
  report.eee = eee(*in.model, *in.x);
  report.qmi = qmi(*in.model, *in.x);
  return report;
}

}  // namespace c2h
