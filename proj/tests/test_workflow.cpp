#include <algorithm>
#include <filesystem>
#include <fstream>

#include "c2h/config.hpp"
#include "c2h/pipeline.hpp"
#include "c2h/serialize.hpp"
#include "c2h/workflow.hpp"
#include "doctest.h"

using namespace c2h;

namespace {

DiagnosticsReport calm_report() {
  DiagnosticsReport r;
  r.tsi = 1;
  r.eee = 0.5;
  r.qmi = 1.0;
  r.edqfs = 1.0;
  r.qos = 50;
  return r;
}

// Ten flowers per class and short training, so a whole workflow runs in seconds.
RunConfig small_config() {
  RunConfig cfg = default_config();
  cfg.data_rows.clear();
  for (std::size_t base : {0u, 50u, 100u})
    for (std::size_t i = 0; i < 10; ++i) cfg.data_rows.push_back(base + i);
  cfg.selftrain.max_iterations = 3;
  cfg.train.epochs = 8;
  cfg.train.patience = 8;
  cfg.bpi_inits = 4;
  return cfg;
}

}  // namespace

TEST_SUITE("workflow") {
  TEST_CASE("default rules") {
    const auto rules = default_rules();
    CHECK(evaluate_rules(calm_report(), rules).empty());

    auto low = calm_report();
    low.eee = 0.175;
    const auto c1 = evaluate_rules(low, rules);
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].kind == ChangeKind::SetReps);
    CHECK(c1[0].reps == 3);
    CHECK(c1[0].entanglement == Entanglement::Circular);

    auto wide = calm_report();
    wide.edqfs = 1.3;
    const auto c2 = evaluate_rules(wide, rules);
    REQUIRE(c2.size() == 1);
    CHECK(c2[0].kind == ChangeKind::EnableAdapter);
    CHECK(c2[0].adapter_l2 == 1e-3);

    auto all = calm_report();
    all.eee = 0.1;
    all.edqfs = 2.0;
    all.qos = 1.0;
    const auto c3 = evaluate_rules(all, rules);
    REQUIRE(c3.size() == 3);
    CHECK(c3[2].kind == ChangeKind::SetHeadWidth);
    CHECK(c3[2].head_width == 16);

    // thresholds are strict
    auto edge = calm_report();
    edge.eee = 0.3;
    edge.edqfs = 1.2;
    edge.qos = 10;
    CHECK(evaluate_rules(edge, rules).empty());
  }

  TEST_CASE("last firing rule of a kind wins") {
    auto rules = default_rules();
    RefinementRule extra{"tsi", Comparator::Greater, 0.5, {}};
    extra.change.kind = ChangeKind::SetHeadWidth;
    extra.change.head_width = 32;
    rules.push_back(extra);
    auto r = calm_report();
    r.qos = 1;
    const auto changes = evaluate_rules(r, rules);
    REQUIRE(changes.size() == 1);
    CHECK(changes[0].head_width == 32);
    CHECK_THROWS(metric_value(r, "bogus"));
    CHECK(rules[0].describe().find("eee < 0.3") == 0);
  }

  TEST_CASE("applying changes") {
    std::vector<Change> all(3);
    all[0].kind = ChangeKind::SetReps;
    all[0].reps = 3;
    all[1].kind = ChangeKind::EnableAdapter;
    all[1].adapter_l2 = 1e-3;
    all[2].kind = ChangeKind::SetHeadWidth;
    all[2].head_width = 16;
    const ModelSpec refined = apply_changes(ModelSpec::minimal(), all);
    CHECK(refined == ModelSpec::refined());
    CHECK(apply_changes(refined, all) == refined);
    CHECK(apply_changes(ModelSpec::minimal(), {}) == ModelSpec::minimal());
    for (int reps : {1, 2, 5}) {
      Change c;
      c.reps = reps;
      CHECK(apply_changes(ModelSpec::minimal(), {c}).circuit().n_params == 6 * reps + 2);
    }
    Change bad;
    bad.reps = 0;
    CHECK_THROWS_AS(apply_changes(ModelSpec::minimal(), {bad}), ContractViolation);
  }

  TEST_CASE("satisfaction predicate") {
    StageResult r;
    r.evaluation.accuracy = 0.85;
    r.evaluation.a_internal = 0.5;
    WorkflowSettings s;
    CHECK(is_satisfied(r, {}, s));
    CHECK(!is_satisfied(r, {Change{}}, s));
    s.use_ground_truth = false;
    CHECK(!is_satisfied(r, {}, s));
  }

  TEST_CASE("loop bounds and stage order") {
    RunConfig cfg = small_config();
    const PreparedData data = prepare_data(cfg);
    REQUIRE(data.x.rows() == 30);

    // always satisfied: exits after round 1
    RunConfig easy = cfg;
    easy.workflow.target_accuracy = 0;
    easy.workflow.eee_below = -1;
    easy.workflow.edqfs_above = 1e9;
    easy.workflow.qos_below = -1;
    std::size_t callbacks = 0;
    const auto done = run_workflow(data, easy, [&](const RoundRecord&) { ++callbacks; });
    CHECK(done.satisfied);
    CHECK(done.rounds.size() == 1);
    CHECK(callbacks == 1);
    CHECK(done.rounds[0].stage_order == std::vector<std::string>{"classical", "quantum-fast", "hybrid-plus"});
    CHECK(done.rounds[0].stages[1].spec == cfg.minimal_spec());

    // never satisfied
    RunConfig hard = cfg;
    hard.workflow.eee_below = 10;
    hard.workflow.max_rounds = 1;
    const auto one = run_workflow(data, hard);
    CHECK(!one.satisfied);
    CHECK(one.rounds.size() == 1);
    CHECK(one.rounds[0].changes.size() >= 1);

    hard.workflow.max_rounds = 2;
    const auto two = run_workflow(data, hard);
    REQUIRE(two.rounds.size() == 2);
    CHECK(two.rounds[1].stage_order == std::vector<std::string>{"hybrid-plus"});
    CHECK(two.rounds[1].changes == two.rounds[0].pending);
    CHECK(two.rounds[0].seed != two.rounds[1].seed);
    CHECK(two.rounds[1].result().spec->reps == 3);

    // reruns agree on every recorded value
    CHECK(to_json(run_workflow(data, hard)).dump() == to_json(two).dump());
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults and keys") {
    const RunConfig cfg = default_config();
    CHECK(cfg.seed == 0);
    CHECK(cfg.pls_components == 2);
    CHECK(cfg.pls_folds == 5);
    CHECK(cfg.selftrain.max_iterations == 20);
    CHECK(cfg.train.epochs == 60);
    CHECK(cfg.scaling == InputScaling::Unit);
    CHECK(cfg.refined_spec() == ModelSpec::refined());
    CHECK(cfg.minimal_spec() == ModelSpec::minimal());
    CHECK(std::filesystem::exists(cfg.data_path));
    const json j = config_to_json(cfg);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == config_keys());
    CHECK(std::is_sorted(keys.begin(), keys.end()));
  }

  TEST_CASE("round trip") {
    RunConfig cfg = default_config();
    cfg.seed = 42;
    cfg.data_rows = {3, 1};
    cfg.scaling = InputScaling::MaxAbs;
    cfg.train.lr_quantum = 0.02;
    cfg.refined_entanglement = Entanglement::Linear;
    cfg.workflow.qos_below = 4.5;
    RunConfig back = default_config();
    apply_config_json(back, config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
  }

  TEST_CASE("errors") {
    RunConfig cfg = default_config();
    CHECK_THROWS_AS(apply_config_json(cfg, json{{"pls.bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(apply_config_json(cfg, json{{"seed", "seven"}}), ConfigError);
    CHECK_THROWS_AS(apply_config_json(cfg, json{{"data.rows", 5}}), ConfigError);
    CHECK_THROWS_AS(input_scaling_from_string("log"), ConfigError);
    CHECK_THROWS_AS(stage_from_string("bogus"), ConfigError);
    cfg.pls_folds = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    RunConfig t = default_config();
    t.train.patience = 100;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    RunConfig rows = default_config();
    rows.data_rows = {0, 150};
    CHECK_THROWS(prepare_data(rows));
  }
}

TEST_SUITE("serialize") {
  TEST_CASE("model, trace and diagnostics round trips") {
    auto m = make_model(ModelSpec::refined(), {0, 3, 7}, 5);
    const HybridModel back = hybrid_model_from_json(json::parse(to_json(m).dump()));
    CHECK(flatten_params(back) == flatten_params(m));
    CHECK(back.circuit == m.circuit);
    CHECK(back.vocabulary == m.vocabulary);
    CHECK(back.adapter_l2 == m.adapter_l2);
    CHECK(back.variant == m.variant);
    const auto minimal = make_model(ModelSpec::minimal(), {1, 2}, 5);
    CHECK(!hybrid_model_from_json(to_json(minimal)).adapter);

    TrainingTrace t;
    t.loss = {1.0, 0.5};
    t.quantum_grad_norm = {0.1, 0.2};
    t.classical_grad_norm = {0.3, 0.4};
    t.stopped_early = true;
    const auto tb = trace_from_json(json::parse(to_json(t).dump()));
    CHECK(tb.loss == t.loss);
    CHECK(tb.classical_grad_norm == t.classical_grad_norm);
    CHECK(tb.stopped_early);

    DiagnosticsReport r{0.9, 0.1, 1e-5, 1.3, 4.2, 0.175, 0.35};
    const auto rb = diagnostics_from_json(to_json(r));
    CHECK(rb.bpi == r.bpi);
    CHECK(rb.qmi == r.qmi);
    const json dj = to_json(r);
    for (const char* k : {"tsi", "qgn", "bpi", "edqfs", "qos", "eee", "qmi"}) CHECK(dj.contains(k));

    const RealMatrix mat = RealMatrix::from_rows({{1, 2}, {3, 4.5}});
    CHECK(matrix_from_json(to_json(mat)) == mat);
  }

  TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "c2h_serialize_test";
    std::filesystem::create_directories(dir);
    const std::vector<int> labels{4, 0, 4, 2};
    write_labels_csv(dir / "labels.csv", labels);
    CHECK(read_labels_csv(dir / "labels.csv") == labels);
    {
      std::ofstream bad(dir / "bad.csv");
      bad << "id,value\n0,1\n";
    }
    CHECK_THROWS(read_labels_csv(dir / "bad.csv"));
    write_json(dir / "x.json", json{{"a", 1}});
    CHECK(read_json(dir / "x.json") == json{{"a", 1}});
    {
      std::ofstream bad(dir / "broken.json");
      bad << "{ nope";
    }
    CHECK_THROWS_AS(read_json(dir / "broken.json"), std::runtime_error);
    CHECK_THROWS(read_json(dir / "absent.json"));
    std::filesystem::remove_all(dir);
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("prepared inputs") {
    const PreparedData d = prepare_data(default_config());
    CHECK(d.x.rows() == 150);
    CHECK(d.x.cols() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto col = d.x.column(j);
      CHECK(*std::min_element(col.begin(), col.end()) == doctest::Approx(0.0));
      CHECK(*std::max_element(col.begin(), col.end()) == doctest::Approx(1.0));
    }
    RunConfig ma = default_config();
    ma.scaling = InputScaling::MaxAbs;
    for (double v : prepare_data(ma).x.data()) CHECK(std::abs(v) <= 1.0 + 1e-12);
  }

  TEST_CASE("classical stage reproduces exactly") {
    RunConfig cfg = default_config();
    cfg.seed = 3;
    const PreparedData d = prepare_data(cfg);
    const auto a = run_stage(StageKind::Classical, d, cfg), b = run_stage(StageKind::Classical, d, cfg);
    CHECK(a.state.labels == b.state.labels);
    CHECK(a.evaluation.accuracy == b.evaluation.accuracy);
    CHECK(a.evaluation.a_internal == b.evaluation.a_internal);
    CHECK(to_json(a.evaluation) == to_json(b.evaluation));
    CHECK(a.state.iteration <= 20);
    CHECK(!a.diagnostics);
  }

  TEST_CASE("hybrid self-training beats the classical baseline on the default seed") {
    const RunConfig cfg = default_config();
    const PreparedData d = prepare_data(cfg);
    const auto classical = run_stage(StageKind::Classical, d, cfg);
    const auto hybrid = run_stage(StageKind::HybridPlus, d, cfg);
    CHECK(hybrid.evaluation.accuracy > classical.evaluation.accuracy);
    REQUIRE(hybrid.diagnostics);
    CHECK(std::abs(hybrid.diagnostics->qmi - 2 * hybrid.diagnostics->eee) < 1e-9);
  }
}
