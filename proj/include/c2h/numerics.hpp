#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2h {

/// Raised when a caller violates an operation's documented preconditions.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static RealMatrix identity(std::size_t n);
  static RealMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  RealMatrix transpose() const;
  RealMatrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const RealMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// xoshiro256** seeded through splitmix64. Output is identical on every
/// platform for a given seed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::size_t below(std::size_t n);
  /// Standard normal via Box-Muller; the second variate of each pair is kept.
  double gaussian();
  /// Independent child stream; advances this generator by one draw.
  SeededRng split();

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Standard normal sample from `rng`.
inline double rng_gaussian(SeededRng& rng) { return rng.gaussian(); }

struct SymEigen {
  std::vector<double> values;  // descending
  RealMatrix vectors;          // column i pairs with values[i]
};

/// Cyclic Jacobi eigensolver for real symmetric matrices.
SymEigen sym_eigen(const RealMatrix& m);

struct Assignment {
  /// row -> column; -1 when the row could only be matched to padding.
  std::vector<int> row_to_col;
  double total_cost = 0.0;
};

/// Minimum-cost assignment (Hungarian method with potentials). Handles
/// rectangular input by padding the short side with a large constant.
Assignment hungarian(const RealMatrix& cost);

/// Inverse of a small dense matrix by Gauss-Jordan with partial pivoting.
RealMatrix small_inverse(const RealMatrix& m);

/// Index of the largest element; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

double l2_norm(std::span<const double> v);

}  // namespace c2h
