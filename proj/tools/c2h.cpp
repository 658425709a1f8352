// Command-line front end: run stages, the refinement workflow, diagnostics and reports.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "c2h/config.hpp"
#include "c2h/pipeline.hpp"
#include "c2h/rundir.hpp"
#include "c2h/serialize.hpp"
#include "c2h/workflow.hpp"

using namespace c2h;

namespace {

struct CommonOptions {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string data;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out = true) {
  cmd->add_option("--config", o.config_file, "flat JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed (falls back to C2H_SEED, then the config)");
  if (with_out) cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--data", o.data, "Iris-format CSV file");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = default_config();
  bool seed_in_file = false;
  if (!o.config_file.empty()) {
    json j;
    try {
      j = read_json(o.config_file);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
    seed_in_file = j.contains("seed");
    apply_config_json(cfg, j);
  }
  if (o.seed) {
    cfg.seed = *o.seed;
  } else if (!seed_in_file) {
    if (const char* env = std::getenv("C2H_SEED")) {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("C2H_SEED is not a non-negative integer: '") + env + "'");
      }
    }
  }
  if (!o.data.empty()) cfg.data_path = o.data;
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string describe(const StageResult& r) {
  std::string s = to_string(r.kind) + ": accuracy " + f4(r.evaluation.accuracy) + " ari " + f4(r.evaluation.ari) +
                  " nmi " + f4(r.evaluation.nmi) + " a_internal " + f4(r.evaluation.a_internal) + " iterations " +
                  std::to_string(r.state.iteration);
  if (r.diagnostics) s += " eee " + f4(r.diagnostics->eee) + " qos " + f4(r.diagnostics->qos);
  return s;
}

int cmd_run(const CommonOptions& o, const std::string& model) {
  const StageKind kind = stage_from_string(model);
  RunConfig cfg = resolve_config(o);
  const fs::path dir = o.out.empty() ? cfg.out_dir / (model + "_seed" + std::to_string(cfg.seed)) : fs::path(o.out);
  cfg.out_dir = dir;
  const PreparedData data = prepare_data(cfg);
  const StageResult result = run_stage(kind, data, cfg);
  write_run_root(dir, cfg, "run --model " + model);
  write_stage_dir(dir, result);
  std::cout << describe(result) << "\n" << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_workflow(const CommonOptions& o, std::optional<std::size_t> max_rounds) {
  RunConfig cfg = resolve_config(o);
  if (max_rounds) cfg.workflow.max_rounds = *max_rounds;
  cfg.validate();
  const fs::path dir = o.out.empty() ? cfg.out_dir / ("workflow_seed" + std::to_string(cfg.seed)) : fs::path(o.out);
  cfg.out_dir = dir;
  const PreparedData data = prepare_data(cfg);
  write_run_root(dir, cfg, "workflow");
  const WorkflowState state = run_workflow(data, cfg, [&](const RoundRecord& r) {
    write_round_dir(dir, r);
    std::string line = "round " + std::to_string(r.round) + ":";
    for (const auto& st : r.stages) line += " " + to_string(st.kind) + " " + f4(st.evaluation.accuracy);
    line += " | applied [";
    for (std::size_t i = 0; i < r.changes.size(); ++i) line += (i ? ", " : "") + r.changes[i].describe();
    line += "] | " + std::string(r.satisfied ? "satisfied" : "not satisfied");
    std::cout << line << std::endl;
  });
  write_workflow_summary(dir, state);
  std::cout << "workflow " << (state.satisfied ? "satisfied" : "not satisfied") << " after " << state.rounds.size()
            << " round(s); wrote " << dir.string() << "\n";
  return 0;
}

int cmd_diagnose(const std::string& run_dir) {
  const DiagnosticsReport report = rediagnose(run_dir);
  const json j = to_json(report);
  write_json(fs::path(run_dir) / "diagnostics.json", j);
  std::cout << j.dump(2) << "\n";
  for (const auto& [key, formula] : DiagnosticsReport::formulas()) std::cout << "  " << key << ": " << formula << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out, bool svg) {
  std::vector<fs::path> dirs;
  for (const auto& r : runs)
    if (!r.empty()) dirs.emplace_back(r);
  if (dirs.empty()) throw ConfigError("report: --runs needs at least one run directory");
  for (const auto& p : write_report(dirs, out, svg)) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_inspect(const CommonOptions& o) {
  const RunConfig cfg = resolve_config(o);
  const PreparedData data = prepare_data(cfg);
  const Dataset& ds = data.dataset;
  std::cout << "file: " << cfg.data_path.string() << "\n"
            << "samples: " << ds.size() << "\nfeatures: " << ds.features.cols() << " (";
  for (std::size_t i = 0; i < ds.feature_names.size(); ++i) std::cout << (i ? ", " : "") << ds.feature_names[i];
  std::cout << ")\nclasses:";
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    std::size_t n = 0;
    for (int l : ds.true_labels) n += l == static_cast<int>(c);
    std::cout << " " << ds.class_names[c] << "=" << n;
  }
  double total = 0;
  for (double e : data.pca.eigenvalues) total += e;
  std::cout << "\npca eigenvalues:";
  for (double e : data.pca.eigenvalues) std::cout << " " << f4(e);
  std::cout << "\nexplained variance:";
  for (double e : data.pca.eigenvalues) std::cout << " " << f4(e / total);
  std::cout << "\ninput scaling: " << to_string(cfg.scaling) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical to hybrid quantum self-training workflow on Iris"};
  app.require_subcommand(1);

  CommonOptions run_opts, wf_opts, inspect_opts;
  std::string model;
  auto* run = app.add_subcommand("run", "run one stage end to end");
  run->add_option("--model", model, "classical | quantum-fast | hybrid-plus")
      ->required()
      ->check(CLI::IsMember({"classical", "quantum-fast", "hybrid-plus"}));
  add_common(run, run_opts);

  std::optional<std::size_t> max_rounds;
  auto* wf = app.add_subcommand("workflow", "diagnostics-driven refinement loop");
  add_common(wf, wf_opts);
  wf->add_option("--max-rounds", max_rounds, "refinement rounds")->check(CLI::PositiveNumber);

  std::string diag_dir;
  auto* diag = app.add_subcommand("diagnose", "recompute diagnostics of a hybrid run directory");
  diag->add_option("--run", diag_dir, "run directory")->required();

  std::vector<std::string> report_runs;
  std::string report_out;
  bool report_svg = false;
  auto* report = app.add_subcommand("report", "compare runs and emit tables and scatter plots");
  report->add_option("--runs", report_runs, "run directories, comma separated")->delimiter(',')->required();
  report->add_option("--out", report_out, "output directory")->required();
  report->add_flag("--svg", report_svg, "also write scatter panels");

  auto* data = app.add_subcommand("data", "dataset utilities");
  data->require_subcommand(1);
  auto* inspect = data->add_subcommand("inspect", "summarize the dataset and its PCA");
  add_common(inspect, inspect_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*run) return cmd_run(run_opts, model);
    if (*wf) return cmd_workflow(wf_opts, max_rounds);
    if (*diag) return cmd_diagnose(diag_dir);
    if (*report) return cmd_report(report_runs, report_out, report_svg);
    if (*inspect) return cmd_inspect(inspect_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
