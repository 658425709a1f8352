#include "c2h/evalmetrics.hpp"

#include <algorithm>
#include <cmath>

#include "c2h/data.hpp"
#include "c2h/numerics.hpp"

namespace c2h {

namespace {

void require_same_length(std::span<const int> a, std::span<const int> b, const char* what) {
  if (a.size() != b.size())
    throw ContractViolation(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

std::size_t index_in(const std::vector<int>& ids, int id) {
  return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
}

}  // namespace

Contingency contingency(std::span<const int> learned, std::span<const int> truth) {
  require_same_length(learned, truth, "contingency");
  Contingency c;
  c.row_ids = vocabulary_of(learned);
  c.col_ids = vocabulary_of(truth);
  c.counts.assign(c.row_ids.size(), std::vector<long>(c.col_ids.size(), 0));
  for (std::size_t i = 0; i < learned.size(); ++i)
    ++c.counts[index_in(c.row_ids, learned[i])][index_in(c.col_ids, truth[i])];
  c.total = static_cast<long>(learned.size());
  return c;
}

double ari(std::span<const int> a, std::span<const int> b) {
  require_same_length(a, b, "ari");
  const Contingency c = contingency(a, b);
  double sum_cells = 0.0;
  std::vector<double> row_sums(c.row_ids.size(), 0.0), col_sums(c.col_ids.size(), 0.0);
  for (std::size_t i = 0; i < c.row_ids.size(); ++i)
    for (std::size_t j = 0; j < c.col_ids.size(); ++j) {
      const double n = static_cast<double>(c.counts[i][j]);
      sum_cells += choose2(n);
      row_sums[i] += n;
      col_sums[j] += n;
    }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (double r : row_sums) sum_rows += choose2(r);
  for (double s : col_sums) sum_cols += choose2(s);
  const double total_pairs = choose2(static_cast<double>(c.total));
  if (total_pairs == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total_pairs;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial in the same way (all singletons or one block).
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

double nmi(std::span<const int> a, std::span<const int> b) {
  require_same_length(a, b, "nmi");
  if (a.empty()) return 0.0;
  const Contingency c = contingency(a, b);
  const double n = static_cast<double>(c.total);
  std::vector<double> row_sums(c.row_ids.size(), 0.0), col_sums(c.col_ids.size(), 0.0);
  for (std::size_t i = 0; i < c.row_ids.size(); ++i)
    for (std::size_t j = 0; j < c.col_ids.size(); ++j) {
      row_sums[i] += static_cast<double>(c.counts[i][j]);
      col_sums[j] += static_cast<double>(c.counts[i][j]);
    }
  auto entropy = [n](const std::vector<double>& sums) {
    double h = 0.0;
    for (double s : sums)
      if (s > 0.0) h -= (s / n) * std::log(s / n);
    return h;
  };
  const double ha = entropy(row_sums);
  const double hb = entropy(col_sums);
  double mi = 0.0;
  for (std::size_t i = 0; i < c.row_ids.size(); ++i)
    for (std::size_t j = 0; j < c.col_ids.size(); ++j) {
      const double nij = static_cast<double>(c.counts[i][j]);
      if (nij > 0.0) mi += (nij / n) * std::log(n * nij / (row_sums[i] * col_sums[j]));
    }
  const double denom = 0.5 * (ha + hb);
  if (denom <= 0.0) return 0.0;  // both partitions trivial: 0/0 taken as 0
  return std::clamp(mi / denom, 0.0, 1.0);
}

MappedAccuracy mapped_accuracy(std::span<const int> learned, std::span<const int> truth) {
  require_same_length(learned, truth, "mapped_accuracy");
  MappedAccuracy out;
  if (learned.empty()) return out;
  const Contingency c = contingency(learned, truth);
  RealMatrix cost(c.row_ids.size(), c.col_ids.size());
  for (std::size_t i = 0; i < c.row_ids.size(); ++i)
    for (std::size_t j = 0; j < c.col_ids.size(); ++j) cost(i, j) = -static_cast<double>(c.counts[i][j]);
  const Assignment assignment = hungarian(cost);
  long correct = 0;
  for (std::size_t i = 0; i < c.row_ids.size(); ++i) {
    const int j = assignment.row_to_col[i];
    if (j < 0) continue;
    out.mapping[c.row_ids[i]] = c.col_ids[static_cast<std::size_t>(j)];
    correct += c.counts[i][static_cast<std::size_t>(j)];
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(c.total);
  return out;
}

double internal_consistency(std::span<const int> labels, std::span<const int> predictions) {
  require_same_length(labels, predictions, "internal_consistency");
  if (labels.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) agree += labels[i] == predictions[i];
  return static_cast<double>(agree) / static_cast<double>(labels.size());
}

EvaluationReport evaluate(std::span<const int> labels, std::span<const int> predictions,
                          std::span<const int> truth) {
  EvaluationReport report;
  report.a_internal = internal_consistency(labels, predictions);
  report.accuracy = mapped_accuracy(labels, truth).accuracy;
  report.ari = ari(labels, truth);
  report.nmi = nmi(labels, truth);
  report.contingency = contingency(labels, truth);
  return report;
}

}  // namespace c2h
