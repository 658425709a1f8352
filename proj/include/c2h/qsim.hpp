#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "c2h/numerics.hpp"

namespace c2h {

// Basis index bit q holds qubit q, so qubit 0 is the least significant bit.

enum class GateKind { RY, RZ, CX };
enum class AngleSource { Feature, Parameter, Constant };
enum class Entanglement { Linear, Circular };

struct Gate {
  GateKind kind = GateKind::RY;
  int target = 0;
  int control = -1;  // CX only
  AngleSource source = AngleSource::Constant;
  int slot = -1;       // feature or parameter index
  double scale = 1.0;  // angle = scale * slot value, or scale itself for constants

  static Gate ry(int target, AngleSource src, int slot, double scale = 1.0) {
    return {GateKind::RY, target, -1, src, slot, scale};
  }
  static Gate rz(int target, AngleSource src, int slot, double scale = 1.0) {
    return {GateKind::RZ, target, -1, src, slot, scale};
  }
  static Gate cx(int control, int target) { return {GateKind::CX, target, control, AngleSource::Constant, -1, 0.0}; }

  bool operator==(const Gate&) const = default;
};

struct CircuitSpec {
  int n_qubits = 2;
  int n_features = 0;
  int n_params = 0;
  int reps = 0;  // entangling blocks; 0 marks the single-block minimal ansatz
  Entanglement entanglement = Entanglement::Linear;
  std::vector<Gate> gates;

  std::size_t cx_count() const;
  /// Throws ContractViolation if a slot or qubit index is out of range.
  void validate() const;
  bool operator==(const CircuitSpec&) const = default;
};

struct StateVector {
  int n_qubits = 0;
  ComplexVector amplitudes;

  static StateVector zero(int n_qubits);
  double norm() const;
};

/// Pauli string over {I, Z}; character q acts on qubit q.
struct PauliTerm {
  std::string paulis;
  double coefficient = 1.0;
};

struct Observable {
  std::vector<PauliTerm> terms;
  static Observable single(std::string paulis, double coefficient = 1.0) {
    return Observable{{PauliTerm{std::move(paulis), coefficient}}};
  }
};

// Single gate kernels, in place.
void apply_ry(StateVector& s, int target, double angle);
void apply_rz(StateVector& s, int target, double angle);
void apply_cx(StateVector& s, int control, int target);

double gate_angle(const Gate& g, std::span<const double> features, std::span<const double> params);
void apply_gate(StateVector& s, const Gate& g, double angle);

StateVector run_circuit(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params);

double expectation(const StateVector& state, const Observable& obs);

/// d<obs>/d params[j] by the two-term shift rule, summed over every gate that
/// reads parameter slot j.
double param_shift_grad(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params,
                        const Observable& obs, int j);

/// Readout used by the hybrid models: <Z0>, <Z1>, <Z0 Z1>.
inline constexpr std::size_t kReadoutSize = 3;
using Readout = std::array<double, kReadoutSize>;
Readout readout(const StateVector& state);
std::vector<Observable> readout_observables();

/// Readout values plus their shift-rule derivatives.
struct ReadoutJacobian {
  Readout values{};
  std::vector<Readout> d_params;    // one per parameter slot
  std::vector<Readout> d_features;  // one per feature slot; empty unless requested
};

ReadoutJacobian readout_jacobian(const CircuitSpec& spec, std::span<const double> features,
                                 std::span<const double> params, bool with_features);

struct DensityMatrix {
  std::size_t dim = 0;
  std::vector<Complex> entries;  // row-major dim x dim

  Complex operator()(std::size_t r, std::size_t c) const { return entries[r * dim + c]; }
  Complex trace() const;
  /// Eigenvalues in descending order.
  std::vector<double> eigenvalues() const;
};

/// Partial trace keeping the listed qubits (ascending bit order in the result).
DensityMatrix reduced_density(const StateVector& state, std::span<const int> keep);
DensityMatrix reduced_density(const StateVector& state, int keep);

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// S(A) + S(B) - S(AB) in bits for the cut between `part_a` and the remaining
/// qubits. The joint state is pure, so S(AB) = 0.
double mutual_information(const StateVector& state, std::span<const int> part_a);

/// Feature map [RY(pi x0) RZ(pi x1) on q0; RY(pi x2) RZ(pi x3) on q1] followed by
/// RY per qubit, CX(0->1), RY per qubit. Four parameters.
CircuitSpec build_minimal_circuit();

/// Same feature map, then `reps` blocks of [RY, RZ per qubit; CX(0->1), RY on q1,
/// CX(1->0), RY on q0] and a closing RY layer: 6 reps + 2 parameters. The
/// linear pattern drops the CX(1->0) of each block.
CircuitSpec build_refined_circuit(int reps, Entanglement pattern = Entanglement::Circular);

std::string to_string(GateKind k);
std::string to_string(AngleSource s);
std::string to_string(Entanglement e);
GateKind gate_kind_from_string(const std::string& s);
AngleSource angle_source_from_string(const std::string& s);
Entanglement entanglement_from_string(const std::string& s);

}  // namespace c2h
