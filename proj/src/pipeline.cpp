#include "c2h/pipeline.hpp"

namespace c2h {

std::string to_string(StageKind k) {
  switch (k) {
    case StageKind::Classical: return "classical";
    case StageKind::QuantumFast: return "quantum-fast";
    case StageKind::HybridPlus: return "hybrid-plus";
  }
  return "?";
}

StageKind stage_from_string(const std::string& s) {
  if (s == "classical") return StageKind::Classical;
  if (s == "quantum-fast") return StageKind::QuantumFast;
  if (s == "hybrid-plus") return StageKind::HybridPlus;
  throw ConfigError("unknown model '" + s + "' (expected classical, quantum-fast or hybrid-plus)");
}

PreparedData prepare_data(const Dataset& dataset, InputScaling scaling) {
  PreparedData out;
  out.dataset = dataset;
  const RealMatrix z = standardize(dataset.features);
  out.pca = pca_fit(z, 4);
  out.pca_scores = pca_transform(out.pca, z);
  out.x = scaling == InputScaling::Unit ? scale_unit(out.pca_scores) : scale_max_abs(out.pca_scores);
  return out;
}

PreparedData prepare_data(const RunConfig& cfg) {
  Dataset ds = load_iris(cfg.data_path);
  if (!cfg.data_rows.empty()) {
    for (std::size_t r : cfg.data_rows)
      if (r >= ds.size())
        throw ConfigError("data.rows: index " + std::to_string(r) + " out of range for " + std::to_string(ds.size()) +
                          " rows");
    ds = ds.subset(cfg.data_rows);
  }
  return prepare_data(ds, cfg.scaling);
}

std::uint64_t bpi_seed(std::uint64_t run_seed) {
  std::uint64_t s = run_seed ^ 0x6270692d70726f62ULL;
  return splitmix64(s);
}

namespace {

template <class F>
auto in_stage(StageKind kind, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(to_string(kind), e.what());
  }
}

}  // namespace

StageResult run_classical(const PreparedData& data, const RunConfig& cfg, std::uint64_t seed) {
  return in_stage(StageKind::Classical, [&] {
    StageResult r;
    r.kind = StageKind::Classical;
    r.seed = seed;
    PlsPredictor predictor(cfg.pls_components, cfg.pls_folds, seed);
    r.state = run(init_labels(data.x.rows()), predictor, data.x, cfg.selftrain);
    predictor.fit(data.x, r.state.labels);
    r.predictions = predictor.predict(data.x).labels;
    r.pls = predictor.model();
    r.evaluation = evaluate(r.state.labels, r.predictions, data.dataset.true_labels);
    return r;
  });
}

StageResult run_hybrid(const PreparedData& data, const RunConfig& cfg, const ModelSpec& spec, StageKind kind,
                       std::uint64_t seed, const std::vector<int>* start_labels) {
  return in_stage(kind, [&] {
    StageResult r;
    r.kind = kind;
    r.seed = seed;
    r.spec = spec;
    HybridPredictor predictor(spec, cfg.train, cfg.hybrid_folds, seed, cfg.fixed_vocabulary);
    LabelState start = init_labels(data.x.rows());
    if (start_labels != nullptr) {
      if (start_labels->size() != data.x.rows()) throw ContractViolation("inherited labels have the wrong length");
      start.labels = *start_labels;
    }
    r.state = run(std::move(start), predictor, data.x, cfg.selftrain);
    predictor.fit(data.x, r.state.labels);
    r.predictions = predictor.predict(data.x).labels;
    r.model = predictor.model();
    r.initial_model = predictor.initial_model();
    r.trace = predictor.trace();
    r.evaluation = evaluate(r.state.labels, r.predictions, data.dataset.true_labels);

    DiagnosticInputs in;
    in.trace = &*r.trace;
    in.model = &*r.model;
    in.initial_model = &*r.initial_model;
    in.x = &data.x;
    in.labels = &r.state.labels;
    in.bpi_inits = cfg.bpi_inits;
    in.seed = bpi_seed(seed);
    r.diagnostics = diagnose(in);
    return r;
  });
}

StageResult run_stage(StageKind kind, const PreparedData& data, const RunConfig& cfg) {
  if (kind == StageKind::Classical) return run_classical(data, cfg, cfg.seed);
  std::optional<StageResult> classical;
  if (cfg.inherit_labels) classical = run_classical(data, cfg, cfg.seed);
  const ModelSpec spec = kind == StageKind::QuantumFast ? cfg.minimal_spec() : cfg.refined_spec();
  return run_hybrid(data, cfg, spec, kind, cfg.seed, classical ? &classical->state.labels : nullptr);
}

}  // namespace c2h
