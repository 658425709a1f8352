#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "c2h/numerics.hpp"

namespace c2h {

/// Raised for unreadable or malformed dataset files.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  RealMatrix features;  // N x d
  std::vector<int> true_labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t size() const { return features.rows(); }
  /// Keeps only the listed rows, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Reads a 4-feature / 1-class CSV with header. Class names are mapped to
/// ids in first-appearance order.
Dataset load_iris(const std::filesystem::path& path);

/// Column-wise z-scoring with the population standard deviation.
RealMatrix standardize(const RealMatrix& features);

struct PcaModel {
  std::vector<double> mean;
  RealMatrix components;  // k x d, orthonormal rows
  std::vector<double> eigenvalues;
};

PcaModel pca_fit(const RealMatrix& features, std::size_t k);
RealMatrix pca_transform(const PcaModel& model, const RealMatrix& features);

/// Sample covariance with an N-1 denominator.
RealMatrix covariance(const RealMatrix& features);

/// Divides every column by its largest absolute value so entries fall in [-1, 1].
RealMatrix scale_max_abs(const RealMatrix& features);

/// Maps every column affinely onto [0, 1] (min to 0, max to 1). Constant
/// columns become 0.
RealMatrix scale_unit(const RealMatrix& features);

RealMatrix one_hot(std::span<const int> labels, std::span<const int> vocabulary);

/// Sorted distinct ids.
std::vector<int> vocabulary_of(std::span<const int> labels);

}  // namespace c2h
