#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwl/dataset.hpp"
#include "gwl/metrics.hpp"
#include "gwl/optim/algorithms.hpp"
#include "gwl/surrogates/layout.hpp"

namespace gwl {

/// Fitted model plus everything needed to predict in meters.
struct TrainedModel {
  ModelSpec spec;
  ParamVector params;    // layout of param_layout(spec)
  SvrModel svr;          // fitted duals when spec.family == Svr
  ScalingParams scaler;
  std::vector<int> lags;
  RunResult training;    // best-so-far RMSE trace in scaled units
  double training_cost = 0.0;
  std::string algorithm;  // optimizer name or "classical"
  std::uint64_t seed = 0;
  std::string config;     // optimizer settings as key=value pairs

  /// Prediction for one row already in scaled units; result in scaled units.
  double predict_scaled(std::span<const double> x) const;
  /// Prediction for one row of lag levels in meters; result in meters.
  double predict(std::span<const double> x_meters) const;
  std::vector<double> predict_all(const Matrix& X_meters) const;
};

/// RMSE of the decoded model over the (scaled) training rows. For SVR the
/// cost is the mean validation RMSE over three fixed folds (row i goes to
/// fold i mod 3). Undefined forward passes cost +inf.
Objective objective_rmse(const ModelSpec& spec, const Matrix& X, const Vector& y);

/// Folds used by the SVR objective.
std::vector<std::vector<std::size_t>> svr_objective_folds(std::size_t n);

/// Minimizes objective_rmse with the given optimizer.
TrainedModel train_hybrid(const ModelSpec& spec, const AlgorithmConfig& config, const Matrix& X, const Vector& y,
                          std::uint64_t seed, std::span<const ParamVector> initial = {});

struct ClassicalOptions {
  int anfis_epochs = 100;
  double anfis_learn_rate = 0.01;
  int mlp_epochs = 2000;
  double mlp_learn_rate = 0.5;
  std::vector<double> svr_C_grid{0.1, 1.0, 10.0, 100.0};
  std::vector<double> svr_gamma_grid{0.1, 0.3, 1.0, 3.0};
  double svr_epsilon = 0.01;
  int svr_folds = 5;
};

/// Standalone training: hybrid LSE/gradient ANFIS, backpropagation MLP, or
/// grid-searched SVR.
TrainedModel train_classical(const ModelSpec& spec, const Matrix& X, const Vector& y, std::uint64_t seed,
                             const ClassicalOptions& options = {});

/// Predicts every row of `data` (meters) and scores the result in meters.
MetricsReport evaluate(const TrainedModel& model, const LaggedDataset& data);

}  // namespace gwl
