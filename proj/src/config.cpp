#include "c2h/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#ifndef C2H_DEFAULT_DATA
#define C2H_DEFAULT_DATA "data/iris.csv"
#endif

namespace c2h {

using nlohmann::json;

std::string to_string(InputScaling s) { return s == InputScaling::Unit ? "unit" : "max_abs"; }

InputScaling input_scaling_from_string(const std::string& s) {
  if (s == "unit") return InputScaling::Unit;
  if (s == "max_abs") return InputScaling::MaxAbs;
  throw ConfigError("unknown input scaling '" + s + "' (expected unit or max_abs)");
}

ModelSpec RunConfig::minimal_spec() const {
  ModelSpec s = ModelSpec::minimal();
  s.head_width = minimal_head_width;
  return s;
}

ModelSpec RunConfig::refined_spec() const {
  ModelSpec s = ModelSpec::refined(refined_reps, refined_adapter_l2, refined_head_width);
  s.entanglement = refined_entanglement;
  return s;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(pls_components >= 1, "pls.n_components must be >= 1");
  require(pls_folds >= 2, "pls.folds must be >= 2");
  require(hybrid_folds >= 2, "hybrid.folds must be >= 2");
  require(selftrain.max_iterations >= 1, "selftrain.max_iterations must be >= 1");
  require(selftrain.batch_fraction > 0 && selftrain.batch_fraction <= 1, "selftrain.batch_fraction must be in (0, 1]");
  require(minimal_head_width >= 1 && refined_head_width >= 1, "head widths must be >= 1");
  require(refined_reps >= 1, "hybrid.refined_reps must be >= 1");
  require(std::isfinite(refined_adapter_l2) && refined_adapter_l2 >= 0, "hybrid.adapter_l2 must be >= 0");
  require(bpi_inits >= 2, "diagnostics.bpi_inits must be >= 2");
  require(workflow.max_rounds >= 1, "workflow.max_rounds must be >= 1");
  require(workflow.reps >= 1, "workflow.rule.reps must be >= 1");
  require(workflow.head_width >= 1, "workflow.rule.head_width must be >= 1");
  for (double t : {workflow.target_accuracy, workflow.eee_below, workflow.edqfs_above, workflow.qos_below,
                   workflow.adapter_l2})
    require(std::isfinite(t), "workflow thresholds must be finite");
  try {
    train.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.data_path = C2H_DEFAULT_DATA;
  return cfg;
}

namespace {

struct Field {
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

template <class T>
T read(const json& v, const std::string& key) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' expects a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' expects an integer");
    if (std::is_unsigned_v<T> && v.get<long long>() < 0)
      throw ConfigError("config key '" + key + "' expects a non-negative integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' expects a number");
  } else {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' expects a string");
  }
  return v.get<T>();
}

template <class T>
Field field(const std::string& key, T RunConfig::*member) {
  return {[key, member](RunConfig& c, const json& v) { c.*member = read<T>(v, key); },
          [member](const RunConfig& c) { return json(c.*member); }};
}

template <class S, class T>
Field nested(const std::string& key, S RunConfig::*outer, T S::*member) {
  return {[key, outer, member](RunConfig& c, const json& v) { (c.*outer).*member = read<T>(v, key); },
          [outer, member](const RunConfig& c) { return json((c.*outer).*member); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["data.path"] = {[](RunConfig& c, const json& v) { c.data_path = read<std::string>(v, "data.path"); },
                      [](const RunConfig& c) { return json(c.data_path.string()); }};
    t["data.rows"] = {[](RunConfig& c, const json& v) {
                        if (!v.is_array()) throw ConfigError("config key 'data.rows' expects an array of row indices");
                        c.data_rows.clear();
                        for (const auto& r : v) c.data_rows.push_back(read<std::size_t>(r, "data.rows"));
                      },
                      [](const RunConfig& c) { return json(c.data_rows); }};
    t["data.scaling"] = {
        [](RunConfig& c, const json& v) { c.scaling = input_scaling_from_string(read<std::string>(v, "data.scaling")); },
        [](const RunConfig& c) { return json(to_string(c.scaling)); }};
    t["seed"] = field("seed", &RunConfig::seed);
    t["pls.n_components"] = field("pls.n_components", &RunConfig::pls_components);
    t["pls.folds"] = field("pls.folds", &RunConfig::pls_folds);
    t["selftrain.max_iterations"] =
        nested("selftrain.max_iterations", &RunConfig::selftrain, &SelfTrainConfig::max_iterations);
    t["selftrain.batch_fraction"] =
        nested("selftrain.batch_fraction", &RunConfig::selftrain, &SelfTrainConfig::batch_fraction);
    t["selftrain.inherit_labels"] = field("selftrain.inherit_labels", &RunConfig::inherit_labels);
    t["hybrid.lr_quantum"] = nested("hybrid.lr_quantum", &RunConfig::train, &TrainConfig::lr_quantum);
    t["hybrid.lr_classical"] = nested("hybrid.lr_classical", &RunConfig::train, &TrainConfig::lr_classical);
    t["hybrid.beta1"] = nested("hybrid.beta1", &RunConfig::train, &TrainConfig::beta1);
    t["hybrid.beta2"] = nested("hybrid.beta2", &RunConfig::train, &TrainConfig::beta2);
    t["hybrid.adam_epsilon"] = nested("hybrid.adam_epsilon", &RunConfig::train, &TrainConfig::adam_epsilon);
    t["hybrid.epochs"] = nested("hybrid.epochs", &RunConfig::train, &TrainConfig::epochs);
    t["hybrid.patience"] = nested("hybrid.patience", &RunConfig::train, &TrainConfig::patience);
    t["hybrid.clip"] = nested("hybrid.clip", &RunConfig::train, &TrainConfig::clip);
    t["hybrid.min_improvement"] = nested("hybrid.min_improvement", &RunConfig::train, &TrainConfig::min_improvement);
    t["hybrid.folds"] = field("hybrid.folds", &RunConfig::hybrid_folds);
    t["hybrid.fixed_vocabulary"] = field("hybrid.fixed_vocabulary", &RunConfig::fixed_vocabulary);
    t["hybrid.minimal_head_width"] = field("hybrid.minimal_head_width", &RunConfig::minimal_head_width);
    t["hybrid.refined_reps"] = field("hybrid.refined_reps", &RunConfig::refined_reps);
    t["hybrid.refined_entanglement"] = {
        [](RunConfig& c, const json& v) {
          try {
            c.refined_entanglement = entanglement_from_string(read<std::string>(v, "hybrid.refined_entanglement"));
          } catch (const ContractViolation& e) {
            throw ConfigError(e.what());
          }
        },
        [](const RunConfig& c) { return json(to_string(c.refined_entanglement)); }};
    t["hybrid.adapter_l2"] = field("hybrid.adapter_l2", &RunConfig::refined_adapter_l2);
    t["hybrid.refined_head_width"] = field("hybrid.refined_head_width", &RunConfig::refined_head_width);
    t["diagnostics.bpi_inits"] = field("diagnostics.bpi_inits", &RunConfig::bpi_inits);
    t["workflow.max_rounds"] = nested("workflow.max_rounds", &RunConfig::workflow, &WorkflowSettings::max_rounds);
    t["workflow.target_accuracy"] =
        nested("workflow.target_accuracy", &RunConfig::workflow, &WorkflowSettings::target_accuracy);
    t["workflow.use_ground_truth"] =
        nested("workflow.use_ground_truth", &RunConfig::workflow, &WorkflowSettings::use_ground_truth);
    t["workflow.rule.eee_below"] = nested("workflow.rule.eee_below", &RunConfig::workflow, &WorkflowSettings::eee_below);
    t["workflow.rule.reps"] = nested("workflow.rule.reps", &RunConfig::workflow, &WorkflowSettings::reps);
    t["workflow.rule.edqfs_above"] =
        nested("workflow.rule.edqfs_above", &RunConfig::workflow, &WorkflowSettings::edqfs_above);
    t["workflow.rule.adapter_l2"] =
        nested("workflow.rule.adapter_l2", &RunConfig::workflow, &WorkflowSettings::adapter_l2);
    t["workflow.rule.qos_below"] = nested("workflow.rule.qos_below", &RunConfig::workflow, &WorkflowSettings::qos_below);
    t["workflow.rule.head_width"] =
        nested("workflow.rule.head_width", &RunConfig::workflow, &WorkflowSettings::head_width);
    t["output.dir"] = {[](RunConfig& c, const json& v) { c.out_dir = read<std::string>(v, "output.dir"); },
                       [](const RunConfig& c) { return json(c.out_dir.string()); }};
    return t;
  }();
  return table;
}

}  // namespace

void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  const auto& table = fields();
  for (const auto& [key, value] : j.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second.set(cfg, value);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  apply_config_json(cfg, j);
}

json config_to_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [key, f] : fields()) j[key] = f.get(cfg);
  return j;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, f] : fields()) keys.push_back(key);
  return keys;
}

}  // namespace c2h
