#pragma once

#include <map>
#include <span>
#include <vector>

namespace c2h {

/// Counts of (learned id, true id) pairs. Rows follow the sorted distinct
/// learned ids, columns the sorted distinct true ids.
struct Contingency {
  std::vector<int> row_ids;
  std::vector<int> col_ids;
  std::vector<std::vector<long>> counts;
  long total = 0;
};

Contingency contingency(std::span<const int> learned, std::span<const int> truth);

/// Pair-counting adjusted Rand index.
double ari(std::span<const int> a, std::span<const int> b);

/// Mutual information normalized by the arithmetic mean of the two entropies.
double nmi(std::span<const int> a, std::span<const int> b);

struct MappedAccuracy {
  double accuracy = 0.0;
  std::map<int, int> mapping;  // learned id -> true id, one-to-one
};

/// Accuracy after the best one-to-one matching of learned ids to true ids.
MappedAccuracy mapped_accuracy(std::span<const int> learned, std::span<const int> truth);

/// Fraction of samples whose label equals the model's full-data prediction.
double internal_consistency(std::span<const int> labels, std::span<const int> predictions);

struct EvaluationReport {
  double a_internal = 0.0;
  double accuracy = 0.0;
  double ari = 0.0;
  double nmi = 0.0;
  Contingency contingency;
};

EvaluationReport evaluate(std::span<const int> labels, std::span<const int> predictions,
                          std::span<const int> truth);

}  // namespace c2h
