#include <cmath>
#include <numbers>
#include <numeric>

#include "c2h/data.hpp"
#include "c2h/diagnostics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace c2h;

namespace {

TrainingTrace trace_of(std::vector<double> loss, double grad = 0.5) {
  TrainingTrace t;
  t.loss = std::move(loss);
  t.quantum_grad_norm.assign(t.loss.size(), grad);
  t.classical_grad_norm.assign(t.loss.size(), grad);
  return t;
}

RealMatrix random_matrix(std::size_t rows, std::size_t cols, SeededRng& rng, double lo = 0, double hi = 1) {
  RealMatrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

HybridModel with_circuit(CircuitSpec circuit) {
  HybridModel m = make_model(ModelSpec::minimal(), {0, 1}, 0);
  m.circuit = std::move(circuit);
  m.theta.assign(static_cast<std::size_t>(m.circuit.n_params), 0.3);
  return m;
}

// Feature map followed by single-qubit rotations only.
CircuitSpec product_circuit() {
  CircuitSpec c = build_minimal_circuit();
  std::erase_if(c.gates, [](const Gate& g) { return g.kind == GateKind::CX; });
  return c;
}

CircuitSpec bell_circuit() {
  CircuitSpec c;
  c.n_features = 4;
  c.gates = {Gate::ry(0, AngleSource::Constant, -1, std::numbers::pi / 2), Gate::cx(0, 1)};
  return c;
}

// Traces of the between- and within-class scatter matrices, summed as outer products.
double scatter_ratio(const RealMatrix& f, const std::vector<int>& labels) {
  const std::size_t d = f.cols();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < f.rows(); ++r) members[labels[r]].push_back(r);
  std::vector<double> mu(d, 0);
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t j = 0; j < d; ++j) mu[j] += f(r, j) / f.rows();
  RealMatrix sb(d, d), sw(d, d);
  for (auto& [label, rows] : members) {
    std::vector<double> mc(d, 0);
    for (auto r : rows)
      for (std::size_t j = 0; j < d; ++j) mc[j] += f(r, j) / rows.size();
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        sb(a, b) += rows.size() * (mc[a] - mu[a]) * (mc[b] - mu[b]);
        for (auto r : rows) sw(a, b) += (f(r, a) - mc[a]) * (f(r, b) - mc[b]);
      }
  }
  double tb = 0, tw = 0;
  for (std::size_t j = 0; j < d; ++j) {
    tb += sb(j, j);
    tw += sw(j, j);
  }
  return tb / tw;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("tsi") {
    CHECK(tsi(trace_of({4, 3, 2, 1})) == 1.0);
    CHECK(tsi(trace_of({1, 2, 3, 4})) == 0.0);
    CHECK(tsi(trace_of({1.0, 0.9, 0.95, 0.8})) == doctest::Approx(2.0 / 3.0));
    CHECK(tsi(trace_of({1.0, 1.0005})) == 1.0);  // within the 0.1% tolerance
    CHECK_THROWS_AS(tsi(trace_of({1.0})), ContractViolation);
  }

  TEST_CASE("qgn") {
    CHECK(qgn(trace_of({3, 2, 1}, 0.7)) == doctest::Approx(0.7));
    CHECK(qgn(trace_of({3, 2, 1}, 0.0)) == 0.0);
    CHECK_THROWS_AS(qgn(TrainingTrace{}), ContractViolation);
    SeededRng rng(2);
    const RealMatrix x = random_matrix(12, 4, rng);
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) labels[i] = i % 2;
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.patience = 5;
    const auto r = train(make_model(ModelSpec::minimal(), {0, 1}, 4), x, labels, cfg);
    REQUIRE(r.trace.epochs() == 5);
    const auto& g = r.trace.quantum_grad_norm;
    CHECK(qgn(r.trace) == doctest::Approx(std::accumulate(g.begin(), g.end(), 0.0) / 5).epsilon(1e-14));
  }

  TEST_CASE("bpi") {
    CircuitSpec flat;
    flat.n_params = 1;
    flat.gates = {Gate::rz(0, AngleSource::Parameter, 0)};  // phase only, Z expectations never move
    CHECK(bpi(flat, {}, 32, 1) < 1e-30);
    CircuitSpec none;
    CHECK(bpi(none, {}, 32, 1) == 0.0);

    const auto c = build_minimal_circuit();
    const std::vector<double> sample{0.2, 0.4, 0.6, 0.8};
    CHECK(bpi(c, sample, 32, 9) == bpi(c, sample, 32, 9));
    CHECK_THROWS_AS(bpi(c, sample, 1, 9), ContractViolation);

    // same draws, variance by the two-pass formula
    SeededRng rng(9);
    std::vector<double> grads;
    std::vector<double> theta(4);
    for (int r = 0; r < 32; ++r) {
      for (double& t : theta) t = rng.uniform(-std::numbers::pi / 8, std::numbers::pi / 8);
      grads.push_back(param_shift_grad(c, sample, theta, Observable::single("ZZ"), 0));
    }
    CHECK(std::abs(bpi(c, sample, 32, 9) - oracle::two_pass_variance(grads)) < 1e-14);
    CHECK(bpi(c, sample, 32, 9) > 0.0);
  }

  TEST_CASE("edqfs") {
    RealMatrix iso(6, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      iso(2 * i, i) = 1;
      iso(2 * i + 1, i) = -1;
    }
    CHECK(edqfs(iso) == doctest::Approx(3.0).epsilon(1e-12));
    RealMatrix line(5, 3);
    for (std::size_t i = 0; i < 5; ++i) line(i, 1) = static_cast<double>(i);
    CHECK(edqfs(line) == doctest::Approx(1.0).epsilon(1e-12));

    SeededRng rng(14);
    const RealMatrix f = random_matrix(20, 3, rng, -1, 1);
    // covariance by explicit sums, then its spectrum
    RealMatrix cov(3, 3);
    std::vector<double> mu(3, 0);
    for (std::size_t r = 0; r < 20; ++r)
      for (std::size_t j = 0; j < 3; ++j) mu[j] += f(r, j) / 20;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t r = 0; r < 20; ++r) cov(a, b) += (f(r, a) - mu[a]) * (f(r, b) - mu[b]);
        cov(a, b) /= 19;
      }
    const auto ev = sym_eigen(cov).values;
    double s = 0, s2 = 0;
    for (double l : ev) {
      s += l;
      s2 += l * l;
    }
    CHECK(edqfs(f) == doctest::Approx(s * s / s2).epsilon(1e-10));
    CHECK_THROWS_AS(edqfs(RealMatrix(1, 3)), ContractViolation);
  }

  TEST_CASE("qos") {
    const RealMatrix same = RealMatrix::from_rows({{0, 1}, {0, -1}, {1, 0}, {-1, 0}});
    CHECK(qos(same, std::vector<int>{0, 0, 1, 1}) == doctest::Approx(0.0));
    const RealMatrix points = RealMatrix::from_rows({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
    CHECK(qos(points, std::vector<int>{3, 3, 8, 8}) == kQosCap);

    SeededRng rng(5);
    RealMatrix f(40, 3);
    std::vector<int> labels;
    for (std::size_t r = 0; r < 40; ++r) {
      const int c = static_cast<int>(r % 2);
      for (std::size_t j = 0; j < 3; ++j) f(r, j) = rng.gaussian() + (j == 0 && c ? 4.0 : 0.0);
      labels.push_back(c);
    }
    CHECK(qos(f, labels) == doctest::Approx(scatter_ratio(f, labels)).epsilon(1e-12));
    CHECK_THROWS_AS(qos(f, std::vector<int>(40, 1)), ContractViolation);
    CHECK_THROWS_AS(qos(f, std::vector<int>(3, 1)), ContractViolation);
  }

  TEST_CASE("entanglement measures") {
    SeededRng rng(3);
    const RealMatrix x = random_matrix(15, 4, rng);
    const auto prod = with_circuit(product_circuit());
    CHECK(std::abs(eee(prod, x)) < 1e-12);
    CHECK(std::abs(qmi(prod, x)) < 1e-12);
    const auto bell = with_circuit(bell_circuit());
    CHECK(eee(bell, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qmi(bell, x) == doctest::Approx(2.0).epsilon(1e-12));
    const auto refined = make_model(ModelSpec::refined(), {0, 1, 2}, 8);
    CHECK(std::abs(qmi(refined, x) - 2 * eee(refined, x)) < 1e-9);
  }

  TEST_CASE("reported value pairs obey qmi = 2 eee") {
    CHECK(0.350 == doctest::Approx(2 * 0.175).epsilon(1e-12));
    CHECK(1.436 == doctest::Approx(2 * 0.718).epsilon(1e-12));
  }

  TEST_CASE("diagnose") {
    SeededRng rng(10);
    const RealMatrix x = random_matrix(30, 4, rng);
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) labels[i] = i % 3;
    const auto initial = make_model(ModelSpec::refined(), {0, 1, 2}, 10);
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.patience = 6;
    const auto trained = train(initial, x, labels, cfg);

    DiagnosticInputs in;
    in.trace = &trained.trace;
    in.model = &trained.model;
    in.initial_model = &initial;
    in.x = &x;
    in.labels = &labels;
    in.seed = 77;
    const auto r = diagnose(in);
    CHECK(r.tsi == tsi(trained.trace));
    CHECK(r.qgn == qgn(trained.trace));
    CHECK(r.eee == eee(trained.model, x));
    CHECK(std::abs(r.qmi - 2 * r.eee) < 1e-9);
    CHECK(r.bpi == bpi(initial.circuit, encode_input(initial, x.row(0)), 32, 77));
    CHECK(r.qos == qos(quantum_features(trained.model, x), labels));
    CHECK(r.edqfs >= 1.0);
    CHECK(r.edqfs <= 3.0 + 1e-12);
    CHECK(DiagnosticsReport::formulas().size() == 7);

    const std::vector<int> single(30, 4);
    in.labels = &single;
    CHECK(diagnose(in).qos == 0.0);
    in.trace = nullptr;
    CHECK_THROWS_AS(diagnose(in), MissingArtifact);
  }
}
