#include <algorithm>
#include <cmath>
#include <numeric>

#include "c2h/numerics.hpp"
#include "doctest.h"

using namespace c2h;

namespace {

RealMatrix random_symmetric(std::size_t n, SeededRng& rng) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(-2.0, 2.0);
  return m;
}

// Closed-form roots of the characteristic cubic of a symmetric 3x3 matrix.
std::vector<double> cubic_eigenvalues(const RealMatrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  RealMatrix b(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  const double det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                     b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2 * M_PI / 3);
  return {e1, 3 * q - e1 - e3, e3};
}

double brute_force_assignment(const RealMatrix& cost) {
  std::vector<std::size_t> perm(cost.cols());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double total = 0;
    for (std::size_t r = 0; r < cost.rows(); ++r) total += cost(r, perm[r]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("matrix construction and products") {
    const RealMatrix a = RealMatrix::from_rows({{1, 2}, {3, 4}});
    CHECK(a.rows() == 2);
    CHECK(a(1, 0) == 3);
    CHECK(matmul(a, RealMatrix::identity(2)) == a);
    CHECK(a.transpose()(0, 1) == 3);
    CHECK(a.column(1) == std::vector<double>{2, 4});
    CHECK_THROWS_AS(RealMatrix::from_rows({{1, 2}, {3}}), ContractViolation);
    CHECK_THROWS_AS(matmul(a, RealMatrix(3, 1)), ContractViolation);
  }

  TEST_CASE("rng streams are reproducible and seed dependent") {
    SeededRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    SeededRng g1(7), g2(7), g3(8);
    const double x = g1.gaussian();
    CHECK(x == g2.gaussian());
    CHECK(x != g3.gaussian());
    CHECK(SeededRng(42).next_u64() != c.next_u64());
  }

  TEST_CASE("rng ranges") {
    SeededRng rng(1);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      CHECK(rng.below(7) < 7);
    }
  }

  TEST_CASE("gaussian moments over 1e5 draws") {
    SeededRng rng(2024);
    const int n = 100000;
    std::vector<double> v(n);
    for (double& x : v) x = rng_gaussian(rng);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= n - 1;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
  }

  TEST_CASE("eigen of identity and diagonal") {
    const auto id = sym_eigen(RealMatrix::identity(3));
    for (double v : id.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    const auto d = sym_eigen(RealMatrix::from_rows({{1, 0}, {0, 3}}));
    CHECK(d.values[0] == doctest::Approx(3.0));
    CHECK(d.values[1] == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(0, 0)) < 1e-12);
  }

  TEST_CASE("eigen matches cubic roots on random 3x3") {
    SeededRng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      const RealMatrix m = random_symmetric(3, rng);
      const auto oracle = cubic_eigenvalues(m);
      const auto got = sym_eigen(m).values;
      for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - oracle[i]) < 1e-9);
    }
  }

  TEST_CASE("eigen reconstruction and orthonormality up to 8x8") {
    SeededRng rng(5);
    for (std::size_t n = 1; n <= 8; ++n) {
      const RealMatrix m = random_symmetric(n, rng);
      const auto e = sym_eigen(m);
      CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
      RealMatrix lambda(n, n);
      for (std::size_t i = 0; i < n; ++i) lambda(i, i) = e.values[i];
      CHECK(max_abs_diff(matmul(matmul(e.vectors, lambda), e.vectors.transpose()), m) < 1e-8);
      CHECK(max_abs_diff(matmul(e.vectors.transpose(), e.vectors), RealMatrix::identity(n)) < 1e-10);
      for (std::size_t i = 0; i < n; ++i) {
        RealMatrix v(n, 1);
        for (std::size_t r = 0; r < n; ++r) v(r, 0) = e.vectors(r, i);
        const RealMatrix mv = matmul(m, v);
        for (std::size_t r = 0; r < n; ++r) CHECK(std::abs(mv(r, 0) - e.values[i] * v(r, 0)) < 1e-8);
      }
    }
  }

  TEST_CASE("eigen rejects bad input") {
    CHECK_THROWS_AS(sym_eigen(RealMatrix(2, 3)), ContractViolation);
    CHECK_THROWS_AS(sym_eigen(RealMatrix::from_rows({{1, 2}, {0, 1}})), ContractViolation);
  }

  TEST_CASE("hungarian small cases") {
    const auto a = hungarian(RealMatrix::from_rows({{1, 2}, {2, 1}}));
    CHECK(a.row_to_col == std::vector<int>{0, 1});
    CHECK(a.total_cost == doctest::Approx(2.0));
    RealMatrix diag(4, 4, 1.0);
    for (int i = 0; i < 4; ++i) diag(i, i) = 0.0;
    CHECK(hungarian(diag).row_to_col == std::vector<int>{0, 1, 2, 3});
    CHECK_THROWS_AS(hungarian(RealMatrix()), ContractViolation);
    CHECK_THROWS_AS(hungarian(RealMatrix::from_rows({{NAN}})), ContractViolation);
  }

  TEST_CASE("hungarian equals permutation enumeration up to 6x6") {
    SeededRng rng(11);
    for (std::size_t n = 1; n <= 6; ++n) {
      for (int trial = 0; trial < 20; ++trial) {
        RealMatrix cost(n, n);
        for (double& c : cost.data()) c = std::floor(rng.uniform(0, 10));
        const auto got = hungarian(cost);
        std::vector<int> cols = got.row_to_col;
        std::sort(cols.begin(), cols.end());
        CHECK(std::adjacent_find(cols.begin(), cols.end()) == cols.end());
        double total = 0;
        for (std::size_t r = 0; r < n; ++r) total += cost(r, got.row_to_col[r]);
        CHECK(total == doctest::Approx(got.total_cost));
        CHECK(std::abs(total - brute_force_assignment(cost)) < 1e-12);
      }
    }
  }

  TEST_CASE("hungarian rectangular") {
    // more rows than columns: one row stays unassigned
    const auto a = hungarian(RealMatrix::from_rows({{5, 1}, {1, 5}, {0, 0}}));
    int unassigned = 0;
    for (int c : a.row_to_col) unassigned += c < 0;
    CHECK(unassigned == 1);
    const auto b = hungarian(RealMatrix::from_rows({{3, 1, 2}}));
    CHECK(b.row_to_col == std::vector<int>{1});
  }

  TEST_CASE("small inverse, argmax, norm") {
    const RealMatrix m = RealMatrix::from_rows({{4, 7}, {2, 6}});
    CHECK(max_abs_diff(matmul(m, small_inverse(m)), RealMatrix::identity(2)) < 1e-12);
    const std::vector<double> v{1, 3, 3, 2};
    CHECK(argmax(v) == 1);
    const std::vector<double> w{3, 4};
    CHECK(l2_norm(w) == doctest::Approx(5.0));
  }
}
