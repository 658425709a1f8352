#include "c2h/pls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "c2h/data.hpp"

namespace c2h {

namespace {

constexpr int kMaxInnerIterations = 500;
constexpr double kWeightTolerance = 1e-10;
constexpr double kDegenerateScore = 1e-12;

std::vector<double> column_means(const RealMatrix& m) {
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += m(r, c);
  for (double& v : mean) v /= static_cast<double>(m.rows());
  return mean;
}

void center(RealMatrix& m, const std::vector<double>& mean) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) -= mean[c];
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

PlsModel pls_fit(const RealMatrix& x, const RealMatrix& y, std::size_t n_components) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t l = y.cols();
  if (y.rows() != n) throw ContractViolation("pls_fit: X and Y row counts differ");
  if (n < 2) throw ContractViolation("pls_fit: need at least 2 samples");
  const std::size_t bound = std::min(d, n - 1);
  if (n_components == 0 || n_components > bound)
    throw ContractViolation("pls_fit: n_components=" + std::to_string(n_components) + " must be in [1, " +
                            std::to_string(bound) + "]");
  for (double v : x.data())
    if (!std::isfinite(v)) throw ContractViolation("pls_fit: non-finite X entry");
  for (double v : y.data())
    if (!std::isfinite(v)) throw ContractViolation("pls_fit: non-finite Y entry");

  PlsModel model;
  model.x_mean = column_means(x);
  model.y_mean = column_means(y);
  RealMatrix xr = x;
  RealMatrix yr = y;
  center(xr, model.x_mean);
  center(yr, model.y_mean);

  std::vector<std::vector<double>> ws, ps, qs, ts;
  std::vector<double> w(d), t(n), u(n), q(l), w_old(d);

  for (std::size_t a = 0; a < n_components; ++a) {
    // Seed u with the residual Y column of largest energy.
    std::size_t best_col = 0;
    double best_ss = -1.0;
    for (std::size_t c = 0; c < l; ++c) {
      double ss = 0.0;
      for (std::size_t r = 0; r < n; ++r) ss += yr(r, c) * yr(r, c);
      if (ss > best_ss) {
        best_ss = ss;
        best_col = c;
      }
    }
    if (best_ss <= kDegenerateScore * kDegenerateScore) break;
    for (std::size_t r = 0; r < n; ++r) u[r] = yr(r, best_col);

    bool degenerate = false;
    std::fill(w_old.begin(), w_old.end(), 0.0);
    for (int it = 0; it < kMaxInnerIterations; ++it) {
      const double uu = dot(u, u);
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) w[c] += xr(r, c) * u[r];
      const double wn = l2_norm(w);
      if (uu <= 0.0 || wn < kDegenerateScore) {
        degenerate = true;
        break;
      }
      for (double& v : w) v /= wn;
      for (std::size_t r = 0; r < n; ++r) t[r] = dot(xr.row(r), w);
      const double tt = dot(t, t);
      if (std::sqrt(tt) < kDegenerateScore) {
        degenerate = true;
        break;
      }
      std::fill(q.begin(), q.end(), 0.0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < l; ++c) q[c] += yr(r, c) * t[r];
      for (double& v : q) v /= tt;
      const double qq = dot(q, q);
      if (qq <= 0.0) {
        degenerate = true;
        break;
      }
      for (std::size_t r = 0; r < n; ++r) u[r] = dot(yr.row(r), q) / qq;

      double change = 0.0;
      for (std::size_t c = 0; c < d; ++c) change += (w[c] - w_old[c]) * (w[c] - w_old[c]);
      w_old = w;
      if (std::sqrt(change) < kWeightTolerance) break;
    }
    if (degenerate) break;

    // Final score and loadings for the converged weight vector.
    for (std::size_t r = 0; r < n; ++r) t[r] = dot(xr.row(r), w);
    const double tt = dot(t, t);
    if (std::sqrt(tt) < kDegenerateScore) break;
    std::vector<double> p(d, 0.0);
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) p[c] += xr(r, c) * t[r];
      for (std::size_t c = 0; c < l; ++c) q[c] += yr(r, c) * t[r];
    }
    for (double& v : p) v /= tt;
    for (double& v : q) v /= tt;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) xr(r, c) -= t[r] * p[c];
      for (std::size_t c = 0; c < l; ++c) yr(r, c) -= t[r] * q[c];
    }
    ws.push_back(w);
    ps.push_back(p);
    qs.push_back(q);
    ts.push_back(t);
  }

  const std::size_t c = ws.size();
  model.n_components = c;
  model.x_weights = RealMatrix(d, c);
  model.x_loadings = RealMatrix(d, c);
  model.y_loadings = RealMatrix(l, c);
  model.x_scores = RealMatrix(n, c);
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t i = 0; i < d; ++i) {
      model.x_weights(i, a) = ws[a][i];
      model.x_loadings(i, a) = ps[a][i];
    }
    for (std::size_t i = 0; i < l; ++i) model.y_loadings(i, a) = qs[a][i];
    for (std::size_t r = 0; r < n; ++r) model.x_scores(r, a) = ts[a][r];
  }

  model.coefficients = RealMatrix(d, l);
  if (c > 0) {
    // B = W (P^T W)^-1 Q^T
    const RealMatrix ptw = matmul(model.x_loadings.transpose(), model.x_weights);
    const RealMatrix rotation = matmul(model.x_weights, small_inverse(ptw));
    model.coefficients = matmul(rotation, model.y_loadings.transpose());
  }
  return model;
}

RealMatrix pls_predict(const PlsModel& model, const RealMatrix& x) {
  const std::size_t d = model.x_mean.size();
  if (x.cols() != d)
    throw ContractViolation("pls_predict: expected " + std::to_string(d) + " columns, got " +
                            std::to_string(x.cols()));
  const std::size_t l = model.y_mean.size();
  RealMatrix out(x.rows(), l);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t k = 0; k < l; ++k) out(r, k) = model.y_mean[k];
    for (std::size_t i = 0; i < d; ++i) {
      const double xc = x(r, i) - model.x_mean[i];
      if (xc == 0.0) continue;
      for (std::size_t k = 0; k < l; ++k) out(r, k) += xc * model.coefficients(i, k);
    }
  }
  return out;
}

std::vector<int> decode_argmax(const RealMatrix& scores, std::span<const int> vocabulary) {
  if (scores.cols() != vocabulary.size()) throw ContractViolation("decode_argmax: vocabulary size mismatch");
  std::vector<int> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = vocabulary[argmax(scores.row(r))];
  return out;
}

CvPlan CvPlan::make(std::size_t n_samples, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ContractViolation("CvPlan: need at least 2 folds");
  if (k > n_samples)
    throw ContractViolation("CvPlan: " + std::to_string(k) + " folds but only " + std::to_string(n_samples) +
                            " samples");
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed);
  for (std::size_t i = n_samples; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  CvPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_of.assign(n_samples, 0);
  for (std::size_t pos = 0; pos < n_samples; ++pos) plan.fold_of[order[pos]] = pos % k;
  return plan;
}

std::vector<std::size_t> CvPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> CvPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

LabelPredictions cross_val_predict(const RealMatrix& x, std::span<const int> labels, const CvPlan& plan,
                                   std::size_t n_components) {
  if (labels.size() != x.rows()) throw ContractViolation("cross_val_predict: label count mismatch");
  if (plan.fold_of.size() != x.rows()) throw ContractViolation("cross_val_predict: plan size mismatch");
  if (plan.k < 2) throw ContractViolation("cross_val_predict: need at least 2 folds");

  LabelPredictions out{std::vector<int>(x.rows(), -1), std::vector<double>(x.rows(), 0.0)};
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    const auto train = plan.train_indices(fold);
    const auto test = plan.test_indices(fold);
    if (test.empty() || train.size() < 2)
      throw ContractViolation("cross_val_predict: fold " + std::to_string(fold) + " is too small");
    std::vector<int> train_labels;
    train_labels.reserve(train.size());
    for (std::size_t i : train) train_labels.push_back(labels[i]);
    const auto vocab = vocabulary_of(train_labels);
    const RealMatrix xt = x.select_rows(train);
    const std::size_t c = std::min(n_components, std::min(xt.cols(), xt.rows() - 1));
    const PlsModel model = pls_fit(xt, one_hot(train_labels, vocab), c);
    const RealMatrix scores = pls_predict(model, x.select_rows(test));
    for (std::size_t j = 0; j < test.size(); ++j) {
      const std::size_t best = argmax(scores.row(j));
      out.labels[test[j]] = vocab[best];
      out.confidence[test[j]] = scores(j, best);
    }
  }
  return out;
}

}  // namespace c2h
