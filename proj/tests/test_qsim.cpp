#include <cmath>
#include <numbers>

#include "c2h/qsim.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace c2h;

namespace {

std::vector<double> draw(SeededRng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

double max_diff(const ComplexVector& a, const std::vector<std::complex<double>>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

StateVector bell() {
  StateVector s = StateVector::zero(2);
  apply_ry(s, 0, std::numbers::pi / 2);
  apply_cx(s, 0, 1);
  return s;
}

}  // namespace

TEST_SUITE("qsim") {
  TEST_CASE("single gates match dense matrices") {
    SeededRng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
      StateVector s = StateVector::zero(3);
      std::vector<std::complex<double>> ref(8, 0.0);
      // random start state
      for (std::size_t i = 0; i < 8; ++i) s.amplitudes[i] = ref[i] = {rng.gaussian(), rng.gaussian()};
      const int t = static_cast<int>(rng.below(3));
      const int c = (t + 1 + static_cast<int>(rng.below(2))) % 3;
      const double angle = rng.uniform(-4, 4);
      apply_ry(s, t, angle);
      ref = oracle::dense_apply(oracle::dense_gate(GateKind::RY, t, -1, angle, 3), ref);
      apply_rz(s, c, -angle);
      ref = oracle::dense_apply(oracle::dense_gate(GateKind::RZ, c, -1, -angle, 3), ref);
      apply_cx(s, c, t);
      ref = oracle::dense_apply(oracle::dense_gate(GateKind::CX, t, c, 0, 3), ref);
      CHECK(max_diff(s.amplitudes, ref) < 1e-12);
    }
  }

  TEST_CASE("circuits match the dense oracle") {
    SeededRng rng(11);
    for (const auto& spec : {build_minimal_circuit(), build_refined_circuit(3), build_refined_circuit(2, Entanglement::Linear)}) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto f = draw(rng, 4, 0, 1), p = draw(rng, spec.n_params, -3, 3);
        const auto s = run_circuit(spec, f, p);
        const auto ref = oracle::dense_run(spec, f, p);
        CHECK(max_diff(s.amplitudes, ref) < 1e-12);
        for (const char* paulis : {"ZI", "IZ", "ZZ"})
          CHECK(std::abs(expectation(s, Observable::single(paulis)) -
                         oracle::dense_expectation(ref, oracle::pauli_matrix(paulis))) < 1e-12);
      }
    }
  }

  TEST_CASE("circuit structure") {
    const auto m = build_minimal_circuit();
    CHECK(m.n_params == 4);
    CHECK(m.cx_count() == 1);
    const auto r = build_refined_circuit(3);
    CHECK(r.n_params == 20);
    CHECK(r.cx_count() == 6);
    CHECK(build_refined_circuit(3, Entanglement::Linear).cx_count() == 3);
    CHECK_THROWS_AS(build_refined_circuit(0), ContractViolation);
    CircuitSpec bad = m;
    bad.gates.push_back(Gate::ry(0, AngleSource::Parameter, 9));
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    StateVector s = StateVector::zero(2);
    CHECK_THROWS_AS(apply_cx(s, 1, 1), ContractViolation);
    CHECK_THROWS_AS(apply_ry(s, 2, 0.1), ContractViolation);
  }

  TEST_CASE("readout values and names") {
    const auto s = StateVector::zero(2);
    const Readout r = readout(s);
    CHECK(r[0] == doctest::Approx(1));
    CHECK(r[1] == doctest::Approx(1));
    CHECK(r[2] == doctest::Approx(1));
    StateVector x = StateVector::zero(2);
    apply_ry(x, 0, std::numbers::pi);  // |1> on qubit 0
    const Readout rx = readout(x);
    CHECK(rx[0] == doctest::Approx(-1));
    CHECK(rx[1] == doctest::Approx(1));
    CHECK(rx[2] == doctest::Approx(-1));
    for (auto k : {GateKind::RY, GateKind::RZ, GateKind::CX}) CHECK(gate_kind_from_string(to_string(k)) == k);
    for (auto e : {Entanglement::Linear, Entanglement::Circular}) CHECK(entanglement_from_string(to_string(e)) == e);
  }

  TEST_CASE("shift rule matches central differences") {
    SeededRng rng(5);
    for (const auto& spec : {build_minimal_circuit(), build_refined_circuit(3)}) {
      for (int seed = 0; seed < 5; ++seed) {
        const auto f = draw(rng, 4, 0, 1), p = draw(rng, spec.n_params, -3, 3);
        const auto jac = readout_jacobian(spec, f, p, true);
        const auto obs = readout_observables();
        for (int j = 0; j < spec.n_params; ++j) {
          for (std::size_t o = 0; o < obs.size(); ++o) {
            auto fn = [&](const std::vector<double>& pp) { return expectation(run_circuit(spec, f, pp), obs[o]); };
            const double fd = oracle::central_difference(fn, p, j, 1e-5);
            CHECK(std::abs(param_shift_grad(spec, f, p, obs[o], j) - fd) < 1e-6);
            CHECK(std::abs(jac.d_params[j][o] - fd) < 1e-6);
          }
        }
        for (int k = 0; k < 4; ++k)
          for (std::size_t o = 0; o < obs.size(); ++o) {
            auto fn = [&](const std::vector<double>& ff) { return expectation(run_circuit(spec, ff, p), obs[o]); };
            CHECK(std::abs(jac.d_features[k][o] - oracle::central_difference(fn, f, k, 1e-5)) < 1e-6);
          }
      }
    }
  }

  TEST_CASE("norm is preserved over 1000 random gates") {
    SeededRng rng(21);
    StateVector s = StateVector::zero(2);
    for (int i = 0; i < 1000; ++i) {
      const int t = static_cast<int>(rng.below(2));
      switch (rng.below(3)) {
        case 0: apply_ry(s, t, rng.uniform(-7, 7)); break;
        case 1: apply_rz(s, t, rng.uniform(-7, 7)); break;
        default: apply_cx(s, 1 - t, t);
      }
    }
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  }

  TEST_CASE("reduced density matrices are valid states") {
    SeededRng rng(8);
    const auto spec = build_refined_circuit(3);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = run_circuit(spec, draw(rng, 4, 0, 1), draw(rng, spec.n_params, -3, 3));
      for (int q = 0; q < 2; ++q) {
        const auto rho = reduced_density(s, q);
        CHECK(rho.dim == 2);
        CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
        for (std::size_t r = 0; r < 2; ++r)
          for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(rho(r, c) - std::conj(rho(c, r))) < 1e-12);
        for (double ev : rho.eigenvalues()) CHECK(ev > -1e-12);
      }
      const int both[] = {0, 1};
      const auto full = reduced_density(s, both);
      CHECK(full.eigenvalues()[0] == doctest::Approx(1.0).epsilon(1e-12));
      // pure bipartite state: both sides carry the same entropy
      const double s0 = von_neumann_entropy(reduced_density(s, 0));
      const double s1 = von_neumann_entropy(reduced_density(s, 1));
      CHECK(std::abs(s0 - s1) < 1e-9);
      const int a[] = {0};
      CHECK(std::abs(mutual_information(s, a) - 2 * s0) < 1e-9);
    }
  }

  TEST_CASE("entropy of product and Bell states") {
    StateVector prod = StateVector::zero(2);
    apply_ry(prod, 0, 1.1);
    apply_ry(prod, 1, -0.4);
    CHECK(std::abs(von_neumann_entropy(reduced_density(prod, 0))) < 1e-12);
    const auto b = bell();
    CHECK(von_neumann_entropy(reduced_density(b, 0)) == 1.0);
    const int a[] = {0};
    CHECK(std::abs(mutual_information(b, a) - 2.0) < 1e-12);
  }
}

TEST_SUITE("qsim") {
  TEST_CASE("refined ansatz entangles more than minimal at random angles") {
    // mean qubit-0 entropy over 64 seeds, uniform angles and inputs
    const auto minimal = build_minimal_circuit(), refined = build_refined_circuit(3);
    double s_min = 0, s_ref = 0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
      SeededRng rng(seed);
      const auto f = draw(rng, 4, 0, 1);
      s_min += von_neumann_entropy(reduced_density(run_circuit(minimal, f, draw(rng, 4, -M_PI, M_PI)), 0));
      s_ref += von_neumann_entropy(reduced_density(run_circuit(refined, f, draw(rng, 20, -M_PI, M_PI)), 0));
    }
    CHECK(s_ref / 64 > s_min / 64);
  }
}
