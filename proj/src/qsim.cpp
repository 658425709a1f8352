#include "c2h/qsim.hpp"

#include <algorithm>
#include <cmath>

namespace c2h {

namespace {

constexpr double kHalfPi = M_PI / 2.0;

void check_qubit(const StateVector& s, int q) {
  if (q < 0 || q >= s.n_qubits)
    throw ContractViolation("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(s.n_qubits) + " qubits");
}

// Shared kernels on raw amplitude buffers so the jacobian loop avoids the
// range checks of the public entry points.
inline void ry_raw(Complex* a, std::size_t dim, std::size_t bit, double c, double s) {
  for (std::size_t k = 0; k < dim; ++k) {
    if (k & bit) continue;
    const Complex a0 = a[k];
    const Complex a1 = a[k | bit];
    a[k] = c * a0 - s * a1;
    a[k | bit] = s * a0 + c * a1;
  }
}

inline void rz_raw(Complex* a, std::size_t dim, std::size_t bit, Complex phase0, Complex phase1) {
  for (std::size_t k = 0; k < dim; ++k) a[k] *= (k & bit) ? phase1 : phase0;
}

inline void cx_raw(Complex* a, std::size_t dim, std::size_t cbit, std::size_t tbit) {
  for (std::size_t k = 0; k < dim; ++k)
    if ((k & cbit) && !(k & tbit)) std::swap(a[k], a[k | tbit]);
}

inline void gate_raw(Complex* a, std::size_t dim, const Gate& g, double angle) {
  const std::size_t tbit = std::size_t{1} << g.target;
  switch (g.kind) {
    case GateKind::RY:
      ry_raw(a, dim, tbit, std::cos(angle / 2.0), std::sin(angle / 2.0));
      break;
    case GateKind::RZ:
      rz_raw(a, dim, tbit, std::polar(1.0, -angle / 2.0), std::polar(1.0, angle / 2.0));
      break;
    case GateKind::CX:
      cx_raw(a, dim, std::size_t{1} << g.control, tbit);
      break;
  }
}

inline Readout readout_raw(const Complex* a, std::size_t dim) {
  Readout r{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < dim; ++k) {
    const double p = std::norm(a[k]);
    const double z0 = (k & 1) ? -1.0 : 1.0;
    const double z1 = (k & 2) ? -1.0 : 1.0;
    r[0] += z0 * p;
    r[1] += z1 * p;
    r[2] += z0 * z1 * p;
  }
  return r;
}

std::vector<double> resolve_angles(const CircuitSpec& spec, std::span<const double> features,
                                   std::span<const double> params) {
  std::vector<double> angles(spec.gates.size(), 0.0);
  for (std::size_t g = 0; g < spec.gates.size(); ++g) angles[g] = gate_angle(spec.gates[g], features, params);
  return angles;
}

void check_inputs(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params) {
  if (features.size() != static_cast<std::size_t>(spec.n_features))
    throw ContractViolation("circuit expects " + std::to_string(spec.n_features) + " features, got " +
                            std::to_string(features.size()));
  if (params.size() != static_cast<std::size_t>(spec.n_params))
    throw ContractViolation("circuit expects " + std::to_string(spec.n_params) + " parameters, got " +
                            std::to_string(params.size()));
}

double entropy_from_eigenvalues(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) {
    const double p = std::clamp(v, 0.0, 1.0);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace

std::size_t CircuitSpec::cx_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == GateKind::CX; }));
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > 4) throw ContractViolation("circuit must have 1 to 4 qubits");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    const std::string where = "gate " + std::to_string(i) + ": ";
    if (g.target < 0 || g.target >= n_qubits) throw ContractViolation(where + "target out of range");
    if (g.kind == GateKind::CX) {
      if (g.control < 0 || g.control >= n_qubits) throw ContractViolation(where + "control out of range");
      if (g.control == g.target) throw ContractViolation(where + "CX control equals target");
      continue;
    }
    if (g.source == AngleSource::Feature && (g.slot < 0 || g.slot >= n_features))
      throw ContractViolation(where + "feature slot out of range");
    if (g.source == AngleSource::Parameter && (g.slot < 0 || g.slot >= n_params))
      throw ContractViolation(where + "parameter slot out of range");
  }
}

StateVector StateVector::zero(int n_qubits) {
  StateVector s;
  s.n_qubits = n_qubits;
  s.amplitudes.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  s.amplitudes[0] = 1.0;
  return s;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

void apply_ry(StateVector& s, int target, double angle) {
  check_qubit(s, target);
  ry_raw(s.amplitudes.data(), s.amplitudes.size(), std::size_t{1} << target, std::cos(angle / 2.0),
         std::sin(angle / 2.0));
}

void apply_rz(StateVector& s, int target, double angle) {
  check_qubit(s, target);
  rz_raw(s.amplitudes.data(), s.amplitudes.size(), std::size_t{1} << target, std::polar(1.0, -angle / 2.0),
         std::polar(1.0, angle / 2.0));
}

void apply_cx(StateVector& s, int control, int target) {
  check_qubit(s, control);
  check_qubit(s, target);
  if (control == target) throw ContractViolation("CX control equals target");
  cx_raw(s.amplitudes.data(), s.amplitudes.size(), std::size_t{1} << control, std::size_t{1} << target);
}

double gate_angle(const Gate& g, std::span<const double> features, std::span<const double> params) {
  switch (g.source) {
    case AngleSource::Feature:
      return g.scale * features[static_cast<std::size_t>(g.slot)];
    case AngleSource::Parameter:
      return g.scale * params[static_cast<std::size_t>(g.slot)];
    case AngleSource::Constant:
      return g.scale;
  }
  return 0.0;
}

void apply_gate(StateVector& s, const Gate& g, double angle) {
  switch (g.kind) {
    case GateKind::RY:
      apply_ry(s, g.target, angle);
      break;
    case GateKind::RZ:
      apply_rz(s, g.target, angle);
      break;
    case GateKind::CX:
      apply_cx(s, g.control, g.target);
      break;
  }
}

StateVector run_circuit(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params) {
  spec.validate();
  check_inputs(spec, features, params);
  StateVector s = StateVector::zero(spec.n_qubits);
  for (const Gate& g : spec.gates) apply_gate(s, g, gate_angle(g, features, params));
  return s;
}

double expectation(const StateVector& state, const Observable& obs) {
  double total = 0.0;
  for (const auto& term : obs.terms) {
    if (term.paulis.size() != static_cast<std::size_t>(state.n_qubits))
      throw ContractViolation("Pauli string '" + term.paulis + "' does not match " +
                              std::to_string(state.n_qubits) + " qubits");
    std::size_t mask = 0;
    for (std::size_t q = 0; q < term.paulis.size(); ++q) {
      const char p = term.paulis[q];
      if (p == 'Z') mask |= std::size_t{1} << q;
      else if (p != 'I') throw ContractViolation("unsupported Pauli '" + std::string(1, p) + "'");
    }
    double e = 0.0;
    for (std::size_t k = 0; k < state.amplitudes.size(); ++k) {
      const double sign = (__builtin_popcountll(k & mask) & 1) ? -1.0 : 1.0;
      e += sign * std::norm(state.amplitudes[k]);
    }
    total += term.coefficient * e;
  }
  return total;
}

double param_shift_grad(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params,
                        const Observable& obs, int j) {
  if (j < 0 || j >= spec.n_params)
    throw ContractViolation("param_shift_grad: parameter index " + std::to_string(j) + " out of range");
  spec.validate();
  check_inputs(spec, features, params);
  const auto angles = resolve_angles(spec, features, params);
  double grad = 0.0;
  for (std::size_t target = 0; target < spec.gates.size(); ++target) {
    const Gate& g = spec.gates[target];
    if (g.source != AngleSource::Parameter || g.slot != j) continue;
    if (g.kind == GateKind::CX) throw ContractViolation("param_shift_grad: parameter feeds a non-rotation gate");
    double shifted[2];
    for (int side = 0; side < 2; ++side) {
      StateVector s = StateVector::zero(spec.n_qubits);
      for (std::size_t i = 0; i < spec.gates.size(); ++i) {
        double angle = angles[i];
        if (i == target) angle += side == 0 ? kHalfPi : -kHalfPi;
        apply_gate(s, spec.gates[i], angle);
      }
      shifted[side] = expectation(s, obs);
    }
    grad += g.scale * (shifted[0] - shifted[1]) / 2.0;
  }
  return grad;
}

Readout readout(const StateVector& state) {
  if (state.n_qubits < 2) throw ContractViolation("readout needs at least 2 qubits");
  return readout_raw(state.amplitudes.data(), state.amplitudes.size());
}

std::vector<Observable> readout_observables() {
  return {Observable::single("ZI"), Observable::single("IZ"), Observable::single("ZZ")};
}

ReadoutJacobian readout_jacobian(const CircuitSpec& spec, std::span<const double> features,
                                 std::span<const double> params, bool with_features) {
  check_inputs(spec, features, params);
  if (spec.n_qubits < 2) throw ContractViolation("readout needs at least 2 qubits");
  const std::size_t dim = std::size_t{1} << spec.n_qubits;
  const std::size_t n_gates = spec.gates.size();
  const auto angles = resolve_angles(spec, features, params);

  // prefix[g] is the state before gate g; prefix[n_gates] is the output.
  std::vector<Complex> prefix((n_gates + 1) * dim, Complex{0.0, 0.0});
  prefix[0] = 1.0;
  for (std::size_t g = 0; g < n_gates; ++g) {
    std::copy_n(prefix.begin() + static_cast<std::ptrdiff_t>(g * dim), dim,
                prefix.begin() + static_cast<std::ptrdiff_t>((g + 1) * dim));
    gate_raw(prefix.data() + (g + 1) * dim, dim, spec.gates[g], angles[g]);
  }

  ReadoutJacobian out;
  out.values = readout_raw(prefix.data() + n_gates * dim, dim);
  out.d_params.assign(static_cast<std::size_t>(spec.n_params), Readout{0.0, 0.0, 0.0});
  if (with_features) out.d_features.assign(static_cast<std::size_t>(spec.n_features), Readout{0.0, 0.0, 0.0});

  std::vector<Complex> work(dim);
  for (std::size_t g = 0; g < n_gates; ++g) {
    const Gate& gate = spec.gates[g];
    Readout* slot = nullptr;
    if (gate.source == AngleSource::Parameter) slot = &out.d_params[static_cast<std::size_t>(gate.slot)];
    else if (gate.source == AngleSource::Feature && with_features)
      slot = &out.d_features[static_cast<std::size_t>(gate.slot)];
    if (slot == nullptr || gate.kind == GateKind::CX) continue;

    Readout shifted[2];
    for (int side = 0; side < 2; ++side) {
      std::copy_n(prefix.begin() + static_cast<std::ptrdiff_t>(g * dim), dim, work.begin());
      gate_raw(work.data(), dim, gate, angles[g] + (side == 0 ? kHalfPi : -kHalfPi));
      for (std::size_t i = g + 1; i < n_gates; ++i) gate_raw(work.data(), dim, spec.gates[i], angles[i]);
      shifted[side] = readout_raw(work.data(), dim);
    }
    for (std::size_t o = 0; o < kReadoutSize; ++o) (*slot)[o] += gate.scale * (shifted[0][o] - shifted[1][o]) / 2.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

Complex DensityMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (std::size_t i = 0; i < dim; ++i) t += entries[i * dim + i];
  return t;
}

std::vector<double> DensityMatrix::eigenvalues() const {
  if (dim == 2) {
    const double a = entries[0].real();
    const double d = entries[3].real();
    const double b = std::abs(entries[1]);
    const double mid = 0.5 * (a + d);
    const double radius = 0.5 * std::sqrt((a - d) * (a - d) + 4.0 * b * b);
    return {mid + radius, mid - radius};
  }
  // Real symmetric embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue.
  RealMatrix embed(2 * dim, 2 * dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex z = entries[r * dim + c];
      embed(r, c) = z.real();
      embed(r + dim, c + dim) = z.real();
      embed(r, c + dim) = -z.imag();
      embed(r + dim, c) = z.imag();
    }
  for (std::size_t r = 0; r < 2 * dim; ++r)
    for (std::size_t c = r + 1; c < 2 * dim; ++c) {
      const double avg = 0.5 * (embed(r, c) + embed(c, r));
      embed(r, c) = avg;
      embed(c, r) = avg;
    }
  const auto doubled = sym_eigen(embed).values;
  std::vector<double> out;
  for (std::size_t i = 0; i < doubled.size(); i += 2) out.push_back(doubled[i]);
  return out;
}

DensityMatrix reduced_density(const StateVector& state, std::span<const int> keep) {
  if (keep.empty()) throw ContractViolation("reduced_density: no qubits kept");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw ContractViolation("reduced_density: duplicate qubit");
  for (int q : kept) check_qubit(state, q);

  std::size_t keep_mask = 0;
  for (int q : kept) keep_mask |= std::size_t{1} << q;
  auto compress = [&](std::size_t k) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < kept.size(); ++i)
      if (k & (std::size_t{1} << kept[i])) out |= std::size_t{1} << i;
    return out;
  };

  DensityMatrix rho;
  rho.dim = std::size_t{1} << kept.size();
  rho.entries.assign(rho.dim * rho.dim, Complex{0.0, 0.0});
  const std::size_t full = state.amplitudes.size();
  for (std::size_t k = 0; k < full; ++k) {
    for (std::size_t l = 0; l < full; ++l) {
      if ((k & ~keep_mask) != (l & ~keep_mask)) continue;
      rho.entries[compress(k) * rho.dim + compress(l)] += state.amplitudes[k] * std::conj(state.amplitudes[l]);
    }
  }
  return rho;
}

DensityMatrix reduced_density(const StateVector& state, int keep) {
  const int q[1] = {keep};
  return reduced_density(state, std::span<const int>(q, 1));
}

double von_neumann_entropy(const DensityMatrix& rho) { return entropy_from_eigenvalues(rho.eigenvalues()); }

double mutual_information(const StateVector& state, std::span<const int> part_a) {
  std::vector<int> a(part_a.begin(), part_a.end());
  std::vector<int> b;
  for (int q = 0; q < state.n_qubits; ++q)
    if (std::find(a.begin(), a.end(), q) == a.end()) b.push_back(q);
  if (a.empty() || b.empty()) throw ContractViolation("mutual_information: bipartition has an empty side");
  const double s_a = von_neumann_entropy(reduced_density(state, a));
  const double s_b = von_neumann_entropy(reduced_density(state, b));
  constexpr double s_ab = 0.0;  // pure joint state
  return s_a + s_b - s_ab;
}

// ---------------------------------------------------------------------------

namespace {

void append_feature_map(CircuitSpec& c) {
  c.gates.push_back(Gate::ry(0, AngleSource::Feature, 0, M_PI));
  c.gates.push_back(Gate::rz(0, AngleSource::Feature, 1, M_PI));
  c.gates.push_back(Gate::ry(1, AngleSource::Feature, 2, M_PI));
  c.gates.push_back(Gate::rz(1, AngleSource::Feature, 3, M_PI));
}

}  // namespace

CircuitSpec build_minimal_circuit() {
  CircuitSpec c;
  c.n_qubits = 2;
  c.n_features = 4;
  c.reps = 0;
  c.entanglement = Entanglement::Linear;
  append_feature_map(c);
  int p = 0;
  c.gates.push_back(Gate::ry(0, AngleSource::Parameter, p++));
  c.gates.push_back(Gate::ry(1, AngleSource::Parameter, p++));
  c.gates.push_back(Gate::cx(0, 1));
  c.gates.push_back(Gate::ry(0, AngleSource::Parameter, p++));
  c.gates.push_back(Gate::ry(1, AngleSource::Parameter, p++));
  c.n_params = p;
  return c;
}

CircuitSpec build_refined_circuit(int reps, Entanglement pattern) {
  if (reps < 1) throw ContractViolation("build_refined_circuit: reps must be at least 1");
  CircuitSpec c;
  c.n_qubits = 2;
  c.n_features = 4;
  c.reps = reps;
  c.entanglement = pattern;
  append_feature_map(c);
  int p = 0;
  for (int r = 0; r < reps; ++r) {
    for (int q = 0; q < 2; ++q) {
      c.gates.push_back(Gate::ry(q, AngleSource::Parameter, p++));
      c.gates.push_back(Gate::rz(q, AngleSource::Parameter, p++));
    }
    c.gates.push_back(Gate::cx(0, 1));
    c.gates.push_back(Gate::ry(1, AngleSource::Parameter, p++));
    if (pattern == Entanglement::Circular) c.gates.push_back(Gate::cx(1, 0));
    c.gates.push_back(Gate::ry(0, AngleSource::Parameter, p++));
  }
  c.gates.push_back(Gate::ry(0, AngleSource::Parameter, p++));
  c.gates.push_back(Gate::ry(1, AngleSource::Parameter, p++));
  c.n_params = p;
  return c;
}

std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CX: return "CX";
  }
  return "?";
}

std::string to_string(AngleSource s) {
  switch (s) {
    case AngleSource::Feature: return "feature";
    case AngleSource::Parameter: return "parameter";
    case AngleSource::Constant: return "constant";
  }
  return "?";
}

std::string to_string(Entanglement e) { return e == Entanglement::Circular ? "circular" : "linear"; }

GateKind gate_kind_from_string(const std::string& s) {
  if (s == "RY") return GateKind::RY;
  if (s == "RZ") return GateKind::RZ;
  if (s == "CX") return GateKind::CX;
  throw ContractViolation("unknown gate kind '" + s + "'");
}

AngleSource angle_source_from_string(const std::string& s) {
  if (s == "feature") return AngleSource::Feature;
  if (s == "parameter") return AngleSource::Parameter;
  if (s == "constant") return AngleSource::Constant;
  throw ContractViolation("unknown angle source '" + s + "'");
}

Entanglement entanglement_from_string(const std::string& s) {
  if (s == "circular") return Entanglement::Circular;
  if (s == "linear") return Entanglement::Linear;
  throw ContractViolation("unknown entanglement pattern '" + s + "'");
}

}  // namespace c2h
