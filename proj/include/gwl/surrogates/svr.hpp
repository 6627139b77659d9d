#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gwl/types.hpp"

namespace gwl {

struct SvrHyper {
  double C = 1.0;        // penalty, > 0
  double gamma = 1.0;    // RBF width, > 0
  double epsilon = 0.1;  // tube half-width, >= 0

  void validate() const;
};

/// exp(-|x - x'|^2 / (2 gamma^2)).
double rbf_kernel(std::span<const double> x, std::span<const double> xp, double gamma);

struct SvrModel {
  SvrHyper hyper;
  Matrix support_vectors;               // one row per support vector
  std::vector<double> coefficients;     // alpha - alpha*, one per support vector
  std::vector<std::size_t> support_index;  // row in the training set
  double bias = 0.0;
  bool converged = true;
  long iterations = 0;
};

struct SvrOptions {
  double tolerance = 1e-3;  // stop once the maximal KKT gap is below this
  long max_iterations = 200000;
};

/// Epsilon-SVR dual solved by SMO with second-order working-set selection.
SvrModel svr_fit(const Matrix& X, const Vector& y, const SvrHyper& hyper, const SvrOptions& options = {});

/// sum_r coeff_r K(x_r, x) + b.
double svr_predict(const SvrModel& model, std::span<const double> x);

/// Largest violation of the KKT conditions over the training set, in
/// target units. The model must have been fitted on (X, y).
double svr_max_kkt_violation(const SvrModel& model, const Matrix& X, const Vector& y);

struct GridSearchResult {
  SvrHyper best;
  Matrix cv_rmse;  // rows follow C_grid, columns gamma_grid
};

/// k-fold cross-validated grid search over (C, gamma). Ties go to the
/// smaller C, then the smaller gamma.
GridSearchResult svr_grid_search(const Matrix& X, const Vector& y, std::span<const double> C_grid,
                                 std::span<const double> gamma_grid, double epsilon, int k_folds,
                                 std::uint64_t seed);

/// Mean validation RMSE over k folds for a fixed hyper.
double svr_cv_rmse(const Matrix& X, const Vector& y, const SvrHyper& hyper,
                   const std::vector<std::vector<std::size_t>>& folds);

/// Seeded assignment of n rows to k folds of near-equal size.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int k, std::uint64_t seed);

}  // namespace gwl
