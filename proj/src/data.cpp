#include "c2h/data.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace c2h {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.true_labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw ContractViolation("Dataset::subset: row " + std::to_string(r) + " out of range");
    out.true_labels.push_back(true_labels[r]);
  }
  return out;
}

Dataset load_iris(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open dataset file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw LoadError("dataset file '" + path.string() + "' is empty");
  auto header = split_csv_line(trim(line));
  if (header.size() != 5)
    throw LoadError("expected 5 header columns (4 features + species), found " +
                    std::to_string(header.size()));

  Dataset ds;
  for (std::size_t c = 0; c < 4; ++c) ds.feature_names.push_back(trim(header[c]));

  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 5)
      throw LoadError("line " + std::to_string(line_no) + ": expected 5 columns, found " +
                      std::to_string(cells.size()));
    for (std::size_t c = 0; c < 4; ++c) {
      const std::string cell = trim(cells[c]);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || errno != 0 || !std::isfinite(v))
        throw LoadError("line " + std::to_string(line_no) + ", column '" + ds.feature_names[c] +
                        "': non-numeric value '" + cell + "'");
      values.push_back(v);
    }
    const std::string species = trim(cells[4]);
    if (species.empty())
      throw LoadError("line " + std::to_string(line_no) + ": missing species");
    auto it = std::find(ds.class_names.begin(), ds.class_names.end(), species);
    if (it == ds.class_names.end()) {
      ds.class_names.push_back(species);
      it = ds.class_names.end() - 1;
    }
    ds.true_labels.push_back(static_cast<int>(it - ds.class_names.begin()));
  }
  if (ds.true_labels.empty()) throw LoadError("dataset file '" + path.string() + "' has no rows");
  ds.features = RealMatrix(ds.true_labels.size(), 4, std::move(values));
  return ds;
}

RealMatrix standardize(const RealMatrix& features) {
  const std::size_t n = features.rows();
  RealMatrix out(n, features.cols());
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += features(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (features(r, c) - mean) * (features(r, c) - mean);
    var /= static_cast<double>(n);
    if (!(var > 1e-300))
      throw ContractViolation("standardize: column " + std::to_string(c) + " has zero variance");
    const double sd = std::sqrt(var);
    for (std::size_t r = 0; r < n; ++r) out(r, c) = (features(r, c) - mean) / sd;
  }
  return out;
}

RealMatrix covariance(const RealMatrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n < 2) throw ContractViolation("covariance: need at least 2 samples");
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) mean[c] += features(r, c);
  for (double& m : mean) m /= static_cast<double>(n);
  RealMatrix cov(d, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j)
        cov(i, j) += (features(r, i) - mean[i]) * (features(r, j) - mean[j]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) /= static_cast<double>(n - 1);
      cov(j, i) = cov(i, j);
    }
  return cov;
}

PcaModel pca_fit(const RealMatrix& features, std::size_t k) {
  const std::size_t d = features.cols();
  if (k == 0 || k > d)
    throw ContractViolation("pca_fit: k=" + std::to_string(k) + " must be in [1, " + std::to_string(d) + "]");
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) model.mean[c] += features(r, c);
  for (double& m : model.mean) m /= static_cast<double>(features.rows());

  const SymEigen eig = sym_eigen(covariance(features));
  model.components = RealMatrix(k, d);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t largest = 0;
    for (std::size_t c = 1; c < d; ++c)
      if (std::abs(eig.vectors(c, i)) > std::abs(eig.vectors(largest, i))) largest = c;
    const double sign = eig.vectors(largest, i) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < d; ++c) model.components(i, c) = sign * eig.vectors(c, i);
    model.eigenvalues.push_back(std::max(eig.values[i], 0.0));
  }
  return model;
}

RealMatrix pca_transform(const PcaModel& model, const RealMatrix& features) {
  const std::size_t d = model.mean.size();
  if (features.cols() != d) throw ContractViolation("pca_transform: feature dimension mismatch");
  const std::size_t k = model.components.rows();
  RealMatrix out(features.rows(), k);
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += (features(r, c) - model.mean[c]) * model.components(i, c);
      out(r, i) = s;
    }
  return out;
}

RealMatrix scale_max_abs(const RealMatrix& features) {
  RealMatrix out = features;
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < features.rows(); ++r) m = std::max(m, std::abs(features(r, c)));
    if (m == 0.0) continue;
    for (std::size_t r = 0; r < features.rows(); ++r) out(r, c) /= m;
  }
  return out;
}

RealMatrix scale_unit(const RealMatrix& features) {
  RealMatrix out(features.rows(), features.cols());
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t r = 0; r < features.rows(); ++r) {
      lo = std::min(lo, features(r, c));
      hi = std::max(hi, features(r, c));
    }
    if (!(hi > lo)) continue;
    for (std::size_t r = 0; r < features.rows(); ++r) out(r, c) = (features(r, c) - lo) / (hi - lo);
  }
  return out;
}

RealMatrix one_hot(std::span<const int> labels, std::span<const int> vocabulary) {
  RealMatrix out(labels.size(), vocabulary.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(vocabulary.begin(), vocabulary.end(), labels[i]);
    if (it == vocabulary.end())
      throw ContractViolation("one_hot: label " + std::to_string(labels[i]) + " not in vocabulary");
    out(i, static_cast<std::size_t>(it - vocabulary.begin())) = 1.0;
  }
  return out;
}

std::vector<int> vocabulary_of(std::span<const int> labels) {
  std::set<int> ids(labels.begin(), labels.end());
  return {ids.begin(), ids.end()};
}

}  // namespace c2h
