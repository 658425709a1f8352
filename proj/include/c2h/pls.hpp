#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "c2h/numerics.hpp"

namespace c2h {

/// PLS2 regression fitted with NIPALS.
struct PlsModel {
  std::size_t n_components = 0;  // components actually extracted
  RealMatrix x_weights;          // d x c
  RealMatrix x_loadings;         // d x c
  RealMatrix y_loadings;         // L x c
  RealMatrix x_scores;           // N x c, training scores
  RealMatrix coefficients;       // d x L
  std::vector<double> x_mean;
  std::vector<double> y_mean;
};

PlsModel pls_fit(const RealMatrix& x, const RealMatrix& y, std::size_t n_components);

/// Raw regression scores, N x L.
RealMatrix pls_predict(const PlsModel& model, const RealMatrix& x);

/// Row argmax of `scores` mapped through `vocabulary`; ties go to the lowest id.
std::vector<int> decode_argmax(const RealMatrix& scores, std::span<const int> vocabulary);

/// Shuffled k-fold partition of 0..N-1.
struct CvPlan {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // per sample

  static CvPlan make(std::size_t n_samples, std::size_t k, std::uint64_t seed);
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;
};

struct LabelPredictions {
  std::vector<int> labels;
  std::vector<double> confidence;  // top predicted score per sample
};

/// Out-of-fold PLS predictions: each sample is predicted by the model fitted
/// without its fold, on the one-hot encoding of the labels present in the
/// training folds.
LabelPredictions cross_val_predict(const RealMatrix& x, std::span<const int> labels, const CvPlan& plan,
                                   std::size_t n_components);

}  // namespace c2h
