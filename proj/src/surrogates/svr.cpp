#include "gwl/surrogates/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gwl/error.hpp"
#include "gwl/metrics.hpp"
#include "gwl/random.hpp"

namespace gwl {

void SvrHyper::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw InputError("SVR: C must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("SVR: gamma must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("SVR: epsilon must be non-negative");
}

double rbf_kernel(std::span<const double> x, std::span<const double> xp, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - xp[i]) * (x[i] - xp[i]);
  return std::exp(-d2 / (2.0 * gamma * gamma));
}

namespace {

constexpr double kTau = 1e-12;

// SMO over the 2n-variable form: variable t < n is alpha_t (label +1),
// variable t >= n is alpha*_{t-n} (label -1).
class SmoSolver {
 public:
  SmoSolver(const Matrix& X, const Vector& y, const SvrHyper& hyper)
      : n_(static_cast<std::size_t>(X.rows())), C_(hyper.C), K_(X.rows(), X.rows()) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      K_(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < X.rows(); ++j) {
        K_(i, j) = K_(j, i) = rbf_kernel(row_span(X, i), row_span(X, j), hyper.gamma);
      }
    }
    alpha_.assign(2 * n_, 0.0);
    grad_.resize(2 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      grad_[i] = hyper.epsilon - y(static_cast<Eigen::Index>(i));
      grad_[i + n_] = hyper.epsilon + y(static_cast<Eigen::Index>(i));
    }
  }

  long solve(double tol, long max_iter, bool& converged) {
    long iter = 0;
    converged = false;
    while (iter < max_iter) {
      std::size_t i = 0, j = 0;
      if (select(tol, i, j)) {
        converged = true;
        break;
      }
      update(i, j);
      ++iter;
    }
    return iter;
  }

  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double yg = label(t) * grad_[t];
      if (upper(t)) {
        if (label(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (label(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    return n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  }

  double coefficient(std::size_t i) const { return alpha_[i] - alpha_[i + n_]; }

 private:
  double label(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
  bool upper(std::size_t t) const { return alpha_[t] >= C_; }
  bool lower(std::size_t t) const { return alpha_[t] <= 0.0; }
  double kernel(std::size_t a, std::size_t b) const {
    return K_(static_cast<Eigen::Index>(a % n_), static_cast<Eigen::Index>(b % n_));
  }
  double q(std::size_t a, std::size_t b) const { return label(a) * label(b) * kernel(a, b); }

  // Returns true when the KKT gap is below tol.
  bool select(double tol, std::size_t& out_i, std::size_t& out_j) const {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gi = -1, gj = -1;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      if (label(t) > 0) {
        if (!upper(t) && -grad_[t] >= gmax) { gmax = -grad_[t]; gi = static_cast<std::ptrdiff_t>(t); }
      } else {
        if (!lower(t) && grad_[t] >= gmax) { gmax = grad_[t]; gi = static_cast<std::ptrdiff_t>(t); }
      }
    }
    if (gi < 0) return true;
    const auto i = static_cast<std::size_t>(gi);
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      double diff = 0.0;
      if (label(t) > 0) {
        if (lower(t)) continue;
        diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
      } else {
        if (upper(t)) continue;
        diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
      }
      if (diff > 0.0) {
        double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best_obj) {
          best_obj = obj;
          gj = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (gmax + gmax2 < tol || gj < 0) return true;
    out_i = i;
    out_j = static_cast<std::size_t>(gj);
    return false;
  }

  void update(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i], old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double qij = q(i, j);
    if (label(i) != label(j)) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
      } else {
        if (ai < 0) { ai = 0; aj = -diff; }
      }
      if (diff > 0) {
        if (ai > C_) { ai = C_; aj = C_ - diff; }
      } else {
        if (aj > C_) { aj = C_; ai = C_ + diff; }
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C_) {
        if (ai > C_) { ai = C_; aj = sum - C_; }
      } else {
        if (aj < 0) { aj = 0; ai = sum; }
      }
      if (sum > C_) {
        if (aj > C_) { aj = C_; ai = sum - C_; }
      } else {
        if (ai < 0) { ai = 0; aj = sum; }
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    for (std::size_t t = 0; t < 2 * n_; ++t) grad_[t] += q(i, t) * di + q(j, t) * dj;
  }

  std::size_t n_;
  double C_;
  Eigen::MatrixXd K_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
};

}  // namespace

SvrModel svr_fit(const Matrix& X, const Vector& y, const SvrHyper& hyper, const SvrOptions& options) {
  hyper.validate();
  if (X.rows() < 2) throw InputError("svr_fit: need at least 2 training rows");
  if (X.rows() != y.size()) throw InputError("svr_fit: X and y row counts differ");

  SmoSolver solver(X, y, hyper);
  SvrModel model;
  model.hyper = hyper;
  model.iterations = solver.solve(options.tolerance, options.max_iterations, model.converged);
  model.bias = -solver.rho();

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < static_cast<std::size_t>(X.rows()); ++i) {
    if (solver.coefficient(i) != 0.0) support.push_back(i);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(support.size()), X.cols());
  for (std::size_t s = 0; s < support.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = X.row(static_cast<Eigen::Index>(support[s]));
    model.coefficients.push_back(solver.coefficient(support[s]));
  }
  model.support_index = std::move(support);
  return model;
}

double svr_predict(const SvrModel& model, std::span<const double> x) {
  if (model.support_vectors.rows() > 0 && static_cast<Eigen::Index>(x.size()) != model.support_vectors.cols()) {
    throw InputError("svr_predict: input width does not match the support vectors");
  }
  double f = model.bias;
  for (Eigen::Index s = 0; s < model.support_vectors.rows(); ++s) {
    f += model.coefficients[static_cast<std::size_t>(s)] *
         rbf_kernel(row_span(model.support_vectors, s), x, model.hyper.gamma);
  }
  return f;
}

double svr_max_kkt_violation(const SvrModel& model, const Matrix& X, const Vector& y) {
  std::vector<double> coef(static_cast<std::size_t>(X.rows()), 0.0);
  for (std::size_t s = 0; s < model.support_index.size(); ++s) coef[model.support_index[s]] = model.coefficients[s];
  const double C = model.hyper.C, eps = model.hyper.epsilon;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const double resid = y(r) - svr_predict(model, row_span(X, r));
    const double c = coef[static_cast<std::size_t>(r)];
    double v = 0.0;
    if (c == 0.0) {
      v = std::max(0.0, std::abs(resid) - eps);
    } else if (c > 0.0) {
      v = c >= C ? std::max(0.0, eps - resid) : std::abs(resid - eps);
    } else {
      v = -c >= C ? std::max(0.0, resid + eps) : std::abs(resid + eps);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw InputError("make_folds: need 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

double svr_cv_rmse(const Matrix& X, const Vector& y, const SvrHyper& hyper,
                   const std::vector<std::vector<std::size_t>>& folds) {
  double total = 0.0;
  const auto n = static_cast<std::size_t>(X.rows());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].empty()) throw InputError("svr_cv_rmse: fold " + std::to_string(f) + " has no rows");
    std::vector<char> in_fold(n, 0);
    for (std::size_t r : folds[f]) in_fold[r] = 1;
    const std::size_t n_train = n - folds[f].size();
    Matrix Xt(static_cast<Eigen::Index>(n_train), X.cols());
    Vector yt(static_cast<Eigen::Index>(n_train));
    Eigen::Index k = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (in_fold[r]) continue;
      Xt.row(k) = X.row(static_cast<Eigen::Index>(r));
      yt(k) = y(static_cast<Eigen::Index>(r));
      ++k;
    }
    const SvrModel model = svr_fit(Xt, yt, hyper);
    std::vector<double> obs, pred;
    for (std::size_t r : folds[f]) {
      obs.push_back(y(static_cast<Eigen::Index>(r)));
      pred.push_back(svr_predict(model, row_span(X, static_cast<Eigen::Index>(r))));
    }
    total += rmse(obs, pred);
  }
  return total / static_cast<double>(folds.size());
}

GridSearchResult svr_grid_search(const Matrix& X, const Vector& y, std::span<const double> C_grid,
                                 std::span<const double> gamma_grid, double epsilon, int k_folds,
                                 std::uint64_t seed) {
  if (C_grid.empty() || gamma_grid.empty()) throw InputError("svr_grid_search: empty grid");
  const auto folds = make_folds(static_cast<std::size_t>(X.rows()), k_folds, seed);

  GridSearchResult result;
  result.cv_rmse.resize(static_cast<Eigen::Index>(C_grid.size()), static_cast<Eigen::Index>(gamma_grid.size()));
  double best = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (std::size_t ci = 0; ci < C_grid.size(); ++ci) {
    for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
      const SvrHyper h{C_grid[ci], gamma_grid[gi], epsilon};
      const double err = svr_cv_rmse(X, y, h, folds);
      result.cv_rmse(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(gi)) = err;
      const bool better = !have_best || err < best ||
                          (err == best && (h.C < result.best.C || (h.C == result.best.C && h.gamma < result.best.gamma)));
      if (better) {
        best = err;
        result.best = h;
        have_best = true;
      }
    }
  }
  return result;
}

}  // namespace gwl
