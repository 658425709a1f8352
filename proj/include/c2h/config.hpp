#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "c2h/hybrid.hpp"
#include "c2h/qsim.hpp"
#include "c2h/selftrain.hpp"

namespace c2h {

/// Bad configuration: unknown key, wrong type, or out-of-range value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InputScaling { Unit, MaxAbs };
std::string to_string(InputScaling s);
InputScaling input_scaling_from_string(const std::string& s);

struct WorkflowSettings {
  std::size_t max_rounds = 3;
  double target_accuracy = 0.8;    // mapped accuracy, or internal consistency without ground truth
  bool use_ground_truth = true;
  double eee_below = 0.3;          // -> reps, circular entanglement
  int reps = 3;
  double edqfs_above = 1.2;        // -> adapter on
  double adapter_l2 = 1e-3;
  double qos_below = 10.0;         // -> head width
  std::size_t head_width = 16;
};

/// Every tunable of a run. Serialized as a flat JSON object with
/// module-prefixed keys, e.g. "pls.n_components".
struct RunConfig {
  std::filesystem::path data_path;
  std::vector<std::size_t> data_rows;  // empty keeps every row
  InputScaling scaling = InputScaling::Unit;
  std::uint64_t seed = 0;

  std::size_t pls_components = 2;
  std::size_t pls_folds = 5;

  SelfTrainConfig selftrain;
  bool inherit_labels = false;  // hybrid stages start from the classical result

  TrainConfig train;
  std::size_t hybrid_folds = 5;
  bool fixed_vocabulary = false;
  std::size_t minimal_head_width = 8;
  int refined_reps = 3;
  Entanglement refined_entanglement = Entanglement::Circular;
  double refined_adapter_l2 = 1e-3;
  std::size_t refined_head_width = 16;

  std::size_t bpi_inits = 32;

  WorkflowSettings workflow;

  std::filesystem::path out_dir = "runs";

  ModelSpec minimal_spec() const;
  ModelSpec refined_spec() const;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Defaults with the bundled Iris file as data path.
RunConfig default_config();

/// Overlays the keys of a flat JSON object onto `cfg`. Unknown keys and type
/// mismatches throw ConfigError.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& cfg);

/// All recognized keys, sorted.
std::vector<std::string> config_keys();

}  // namespace c2h
