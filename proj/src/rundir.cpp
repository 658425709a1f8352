#include "c2h/rundir.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "c2h/serialize.hpp"

namespace c2h {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path require(const fs::path& p) {
  if (!fs::exists(p)) throw MissingArtifact("missing run artifact: " + p.string());
  return p;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_run_root(const fs::path& dir, const RunConfig& cfg, const std::string& command) {
  fs::create_directories(dir);
  json saved = config_to_json(cfg);
  saved.erase("output.dir");  // location, not a setting; keeps reruns elsewhere comparable
  write_json(dir / "config.json", saved);
  write_json(dir / "meta.json", {{"timestamp", utc_timestamp()}, {"command", command}});
}

void write_stage_dir(const fs::path& dir, const StageResult& r) {
  fs::create_directories(dir);
  std::set<int> vocab(r.state.labels.begin(), r.state.labels.end());
  write_json(dir / "summary.json", {{"stage", to_string(r.kind)},
                                    {"seed", r.seed},
                                    {"iterations", r.state.iteration},
                                    {"vocabulary_size", vocab.size()}});
  json model;
  if (r.model) {
    model = to_json(*r.model);
    model["spec"] = to_json(*r.spec);
    write_json(dir / "initial_model.json", to_json(*r.initial_model));
  } else if (r.pls) {
    model = to_json(*r.pls);
    model["kind"] = "pls";
  }
  write_json(dir / "model.json", model);
  write_json(dir / "trace.json",
             {{"selftrain", to_json(r.state)}, {"training", r.trace ? to_json(*r.trace) : json(nullptr)}});
  write_json(dir / "evaluation.json", to_json(r.evaluation));
  if (r.diagnostics) write_json(dir / "diagnostics.json", to_json(*r.diagnostics));
  write_labels_csv(dir / "labels.csv", r.state.labels);
}

void write_round_dir(const fs::path& root, const RoundRecord& round) {
  const fs::path dir = root / ("round_" + std::to_string(round.round));
  for (std::size_t i = 0; i + 1 < round.stages.size(); ++i)
    write_stage_dir(dir / round.stage_order[i], round.stages[i]);
  write_stage_dir(dir, round.result());
}

void write_workflow_summary(const fs::path& root, const WorkflowState& state) {
  write_json(root / "workflow.json", to_json(state));
}

fs::path find_config(const fs::path& run_dir) {
  fs::path p = fs::absolute(run_dir);
  for (int up = 0; up <= 3 && !p.empty(); ++up) {
    if (fs::exists(p / "config.json")) return p / "config.json";
    if (p == p.parent_path()) break;
    p = p.parent_path();
  }
  throw MissingArtifact("missing run artifact: no config.json at or above " + run_dir.string());
}

RunConfig load_run_config(const fs::path& run_dir) {
  RunConfig cfg = default_config();
  apply_config_json(cfg, read_json(find_config(run_dir)));
  return cfg;
}

DiagnosticsReport rediagnose(const fs::path& run_dir) {
  const RunConfig cfg = load_run_config(run_dir);
  const json summary = read_json(require(run_dir / "summary.json"));
  if (summary.at("stage").get<std::string>() == to_string(StageKind::Classical))
    throw MissingArtifact("run " + run_dir.string() + " is a classical run; diagnostics need a hybrid model");
  const HybridModel model = hybrid_model_from_json(read_json(require(run_dir / "model.json")));
  const HybridModel initial = hybrid_model_from_json(read_json(require(run_dir / "initial_model.json")));
  const json trace_doc = read_json(require(run_dir / "trace.json"));
  if (!trace_doc.contains("training") || trace_doc.at("training").is_null())
    throw MissingArtifact("missing run artifact: training trace in " + (run_dir / "trace.json").string());
  const TrainingTrace trace = trace_from_json(trace_doc.at("training"));
  const std::vector<int> labels = read_labels_csv(require(run_dir / "labels.csv"));
  const PreparedData data = prepare_data(cfg);
  if (labels.size() != data.x.rows())
    throw std::runtime_error("labels.csv has " + std::to_string(labels.size()) + " rows, data has " +
                             std::to_string(data.x.rows()));

  DiagnosticInputs in;
  in.trace = &trace;
  in.model = &model;
  in.initial_model = &initial;
  in.x = &data.x;
  in.labels = &labels;
  in.bpi_inits = cfg.bpi_inits;
  in.seed = bpi_seed(summary.at("seed").get<std::uint64_t>());
  return diagnose(in);
}

RunSummary load_run_summary(const fs::path& run_dir) {
  RunSummary s;
  s.dir = run_dir;
  s.name = fs::absolute(run_dir).lexically_normal().filename().string();
  if (s.name.empty()) s.name = fs::absolute(run_dir).lexically_normal().parent_path().filename().string();
  s.stage = read_json(require(run_dir / "summary.json")).at("stage").get<std::string>();
  s.evaluation = read_json(require(run_dir / "evaluation.json"));
  const fs::path diag = run_dir / "diagnostics.json";
  s.diagnostics = fs::exists(diag) ? read_json(diag) : json(nullptr);
  s.labels = read_labels_csv(require(run_dir / "labels.csv"));
  return s;
}

std::string scatter_svg(const std::string& title, std::span<const double> xs, std::span<const double> ys,
                        std::span<const int> labels) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double size = 360, margin = 36;
  double x_lo = *std::min_element(xs.begin(), xs.end()), x_hi = *std::max_element(xs.begin(), xs.end());
  double y_lo = *std::min_element(ys.begin(), ys.end()), y_hi = *std::max_element(ys.begin(), ys.end());
  if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1;
  if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1;
  std::map<int, std::size_t> rank;
  for (int l : labels) rank.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, r] : rank) r = next++;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" style=\"fill:#ffffff\"/>\n";
  os << "<text x=\"" << size / 2 << "\" y=\"20\" style=\"font-family:sans-serif;font-size:13px;text-anchor:middle\">"
     << title << "</text>\n";
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin << "\" height=\""
     << size - 2 * margin << "\" style=\"fill:none;stroke:#444444;stroke-width:1\"/>\n";
  os << "<text x=\"" << size / 2 << "\" y=\"" << size - 10
     << "\" style=\"font-family:sans-serif;font-size:11px;text-anchor:middle\">PC1</text>\n";
  os << "<text x=\"12\" y=\"" << size / 2 << "\" transform=\"rotate(-90 12 " << size / 2
     << ")\" style=\"font-family:sans-serif;font-size:11px;text-anchor:middle\">PC2</text>\n";
  const double span = size - 2 * margin - 8;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = margin + 4 + (xs[i] - x_lo) / (x_hi - x_lo) * span;
    const double py = size - margin - 4 - (ys[i] - y_lo) / (y_hi - y_lo) * span;
    const std::size_t r = rank[labels[i]];
    std::string color;
    if (r < 10) {
      color = palette[r];
    } else {
      color = "hsl(" + std::to_string((r * 137) % 360) + ",60%,45%)";
    }
    os << "<circle cx=\"" << fmt(px, 2) << "\" cy=\"" << fmt(py, 2) << "\" r=\"3\" style=\"fill:" << color
       << ";fill-opacity:0.8\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<fs::path> write_report(const std::vector<fs::path>& runs, const fs::path& out, bool svg) {
  if (runs.empty()) throw ConfigError("report: no runs given");
  std::vector<RunSummary> summaries;
  for (const auto& r : runs) summaries.push_back(load_run_summary(r));
  // Disambiguate duplicate directory names.
  std::map<std::string, int> seen;
  for (auto& s : summaries)
    if (seen[s.name]++ > 0) s.name += "_" + std::to_string(seen[s.name] - 1);

  fs::create_directories(out);
  std::vector<fs::path> written;
  static const char* diag_keys[] = {"tsi", "qgn", "bpi", "edqfs", "qos", "eee", "qmi"};

  std::ostringstream csv;
  csv << "run,stage,a_internal,accuracy,ari,nmi";
  for (const char* k : diag_keys) csv << ',' << k;
  csv << '\n';
  json table = json::array();
  for (const auto& s : summaries) {
    csv << s.name << ',' << s.stage;
    json row = {{"run", s.name}, {"stage", s.stage}, {"path", s.dir.string()}};
    for (const char* k : {"a_internal", "accuracy", "ari", "nmi"}) {
      const double v = s.evaluation.at(k).get<double>();
      csv << ',' << fmt(v);
      row[k] = v;
    }
    for (const char* k : diag_keys) {
      if (s.diagnostics.is_null()) {
        csv << ',';
        row[k] = nullptr;
      } else {
        const double v = s.diagnostics.at(k).get<double>();
        csv << ',' << (std::string(k) == "bpi" ? fmt(v, 8) : fmt(v));
        row[k] = v;
      }
    }
    csv << '\n';
    table.push_back(std::move(row));
  }
  {
    std::ofstream f(out / "report.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / "report.csv").string());
    f << csv.str();
  }
  written.push_back(out / "report.csv");
  write_json(out / "report.json", {{"runs", table}, {"diagnostic_definitions", DiagnosticsReport::formulas()}});
  written.push_back(out / "report.json");

  if (svg) {
    const PreparedData data = prepare_data(load_run_config(summaries.front().dir));
    const auto pc1 = data.pca_scores.column(0), pc2 = data.pca_scores.column(1);
    auto emit = [&](const std::string& file, const std::string& title, std::span<const int> labels) {
      if (labels.size() != pc1.size())
        throw std::runtime_error("report: " + file + " labels do not match the dataset size");
      std::ofstream f(out / file, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (out / file).string());
      f << scatter_svg(title, pc1, pc2, labels);
      written.push_back(out / file);
    };
    for (const auto& s : summaries) {
      const std::string acc = fmt(s.evaluation.at("accuracy").get<double>(), 3);
      emit(s.name + ".svg", s.name + " (" + s.stage + ", accuracy " + acc + ")", s.labels);
    }
    emit("ground_truth.svg", "ground truth", data.dataset.true_labels);
  }
  return written;
}

}  // namespace c2h
