#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "c2h/hybrid.hpp"
#include "c2h/numerics.hpp"
#include "c2h/qsim.hpp"

namespace c2h {

/// Training, embedding and circuit diagnostics of a hybrid run. Entropies are
/// in bits.
struct DiagnosticsReport {
  double tsi = 0.0;    // training stability index
  double qgn = 0.0;    // quantum gradient norm
  double bpi = 0.0;    // barren plateau indicator
  double edqfs = 0.0;  // effective dimension of the quantum feature space
  double qos = 0.0;    // quantum output separation
  double eee = 0.0;    // entanglement entropy estimate
  double qmi = 0.0;    // quantum mutual information

  /// Human-readable definition of every field, keyed like the JSON output.
  static const std::map<std::string, std::string>& formulas();
};

/// Share of consecutive epochs whose loss does not rise by more than 0.1%.
double tsi(const TrainingTrace& trace);

/// Mean per-epoch L2 norm of the circuit-parameter gradient.
double qgn(const TrainingTrace& trace);

inline constexpr std::size_t kDefaultBpiInits = 32;

/// Population variance, over `inits` draws of theta ~ U(-pi/8, pi/8), of
/// d<Z0 Z1>/d theta_0 at the fixed circuit input `sample`.
double bpi(const CircuitSpec& circuit, std::span<const double> sample, std::size_t inits, std::uint64_t seed);

/// Participation ratio (sum l)^2 / sum l^2 of the feature covariance spectrum.
double edqfs(const RealMatrix& features);

/// trace(between-class scatter) / trace(within-class scatter).
double qos(const RealMatrix& features, std::span<const int> labels);
inline constexpr double kQosCap = 1e6;

/// Mean single-qubit entropy of qubit 0 over the circuit states of `x`.
double eee(const HybridModel& model, const RealMatrix& x);
/// Mean mutual information across the q0 | q1 cut over the states of `x`.
double qmi(const HybridModel& model, const RealMatrix& x);

struct DiagnosticInputs {
  const TrainingTrace* trace = nullptr;
  const HybridModel* model = nullptr;          // trained
  const HybridModel* initial_model = nullptr;  // untrained, for the plateau probe
  const RealMatrix* x = nullptr;               // PCA-space inputs
  const std::vector<int>* labels = nullptr;    // current label assignment
  std::size_t bpi_inits = kDefaultBpiInits;
  std::uint64_t seed = 0;
};

/// Raised when a required run artifact is absent.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DiagnosticsReport diagnose(const DiagnosticInputs& in);

}  // namespace c2h
