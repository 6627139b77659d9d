#include "gwl/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/format.hpp"

namespace gwl {

namespace {

Matrix scale_rows(const Matrix& X, const ScalingParams& scaler) { return transform(X, scaler, Direction::Forward); }

std::string describe(const AlgorithmConfig& config) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, value] : config_parameters(config)) {
    out << (first ? "" : " ") << name << '=' << format_double(value);
    first = false;
  }
  return out.str();
}

double rmse_of(const ModelSpec& spec, std::span<const double> v, const Matrix& X, const Vector& y) {
  double sse = 0.0;
  if (spec.family == ModelFamily::Anfis) {
    const AnfisParams p = decode_anfis(spec.anfis, v);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      const double e = anfis_forward(spec.anfis, p, row_span(X, r)) - y(r);
      sse += e * e;
    }
  } else {
    const MlpParams p = decode_mlp(spec.mlp, v);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      const double e = mlp_forward(spec.mlp, p, row_span(X, r)) - y(r);
      sse += e * e;
    }
  }
  return std::sqrt(sse / static_cast<double>(X.rows()));
}

void check_data(const ModelSpec& spec, const Matrix& X, const Vector& y) {
  if (X.rows() == 0) throw InputError("training set is empty");
  if (X.rows() != y.size()) throw InputError("training X and y row counts differ");
  if (X.cols() != spec.n_inputs()) {
    throw InputError("model expects " + std::to_string(spec.n_inputs()) + " inputs, data has " +
                     std::to_string(X.cols()) + " columns");
  }
}

}  // namespace

double TrainedModel::predict_scaled(std::span<const double> x) const {
  switch (spec.family) {
    case ModelFamily::Anfis: return anfis_forward(spec.anfis, decode_anfis(spec.anfis, params), x);
    case ModelFamily::Mlp: return mlp_forward(spec.mlp, decode_mlp(spec.mlp, params), x);
    case ModelFamily::Svr: return svr_predict(svr, x);
  }
  return 0.0;
}

double TrainedModel::predict(std::span<const double> x_meters) const {
  if (x_meters.size() != scaler.features.size()) throw InputError("prediction row width does not match the scaler");
  std::vector<double> xs(x_meters.size());
  for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = scale_value(x_meters[j], scaler.features[j], Direction::Forward);
  return scale_value(predict_scaled(xs), scaler.target, Direction::Inverse);
}

std::vector<double> TrainedModel::predict_all(const Matrix& X_meters) const {
  const Matrix Xs = scale_rows(X_meters, scaler);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(Xs.rows()));
  switch (spec.family) {
    case ModelFamily::Anfis: {
      const AnfisParams p = decode_anfis(spec.anfis, params);
      for (Eigen::Index r = 0; r < Xs.rows(); ++r) out.push_back(anfis_forward(spec.anfis, p, row_span(Xs, r)));
      break;
    }
    case ModelFamily::Mlp: {
      const MlpParams p = decode_mlp(spec.mlp, params);
      for (Eigen::Index r = 0; r < Xs.rows(); ++r) out.push_back(mlp_forward(spec.mlp, p, row_span(Xs, r)));
      break;
    }
    case ModelFamily::Svr:
      for (Eigen::Index r = 0; r < Xs.rows(); ++r) out.push_back(svr_predict(svr, row_span(Xs, r)));
      break;
  }
  for (double& v : out) v = scale_value(v, scaler.target, Direction::Inverse);
  return out;
}

std::vector<std::vector<std::size_t>> svr_objective_folds(std::size_t n) {
  if (n < 3) throw InputError("SVR objective needs at least 3 training rows");
  std::vector<std::vector<std::size_t>> folds(3);
  for (std::size_t i = 0; i < n; ++i) folds[i % 3].push_back(i);
  return folds;
}

Objective objective_rmse(const ModelSpec& spec, const Matrix& X, const Vector& y) {
  check_data(spec, X, y);
  Objective obj;
  obj.name = family_name(spec.family) + "-rmse";
  obj.bounds = param_layout(spec).bounds;
  if (spec.family == ModelFamily::Svr) {
    auto folds = svr_objective_folds(static_cast<std::size_t>(X.rows()));
    obj.evaluate = [X, y, folds](std::span<const double> v) {
      try {
        return svr_cv_rmse(X, y, decode_svr(v), folds);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
  } else {
    obj.evaluate = [spec, X, y](std::span<const double> v) {
      try {
        return rmse_of(spec, v, X, y);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
  }
  return obj;
}

TrainedModel train_hybrid(const ModelSpec& spec, const AlgorithmConfig& config, const Matrix& X, const Vector& y,
                          std::uint64_t seed, std::span<const ParamVector> initial) {
  const Objective obj = objective_rmse(spec, X, y);
  TrainedModel model;
  model.spec = spec;
  model.training = minimize(obj, config, seed, initial);
  model.params = model.training.best;
  model.training_cost = model.training.best_cost;
  model.algorithm = algorithm_name(config);
  model.seed = seed;
  model.config = describe(config);
  if (spec.family == ModelFamily::Svr) model.svr = svr_fit(X, y, decode_svr(model.params));
  return model;
}

TrainedModel train_classical(const ModelSpec& spec, const Matrix& X, const Vector& y, std::uint64_t seed,
                             const ClassicalOptions& options) {
  check_data(spec, X, y);
  TrainedModel model;
  model.spec = spec;
  model.algorithm = "classical";
  model.seed = seed;
  model.training.algorithm = "classical";
  model.training.seed = seed;

  auto best_so_far_rmse = [](const std::vector<double>& mse) {
    std::vector<double> trace;
    double best = std::numeric_limits<double>::infinity();
    for (double m : mse) {
      best = std::min(best, std::sqrt(m));
      trace.push_back(best);
    }
    return trace;
  };

  std::ostringstream cfg;
  switch (spec.family) {
    case ModelFamily::Anfis: {
      const AnfisTrainResult r = anfis_classical_train(spec.anfis, X, y, options.anfis_epochs, options.anfis_learn_rate);
      model.params = encode_anfis(spec.anfis, r.params);
      model.training.trace = best_so_far_rmse(r.mse_trace);
      model.training.evaluations = static_cast<long>(r.mse_trace.size());
      cfg << "epochs=" << options.anfis_epochs << " learn_rate=" << format_double(options.anfis_learn_rate);
      break;
    }
    case ModelFamily::Mlp: {
      const MlpTrainResult r = mlp_backprop_train(spec.mlp, X, y, options.mlp_epochs, options.mlp_learn_rate, seed);
      model.params = encode_mlp(spec.mlp, r.params);
      model.training.trace = best_so_far_rmse(r.mse_trace);
      model.training.evaluations = static_cast<long>(r.mse_trace.size());
      cfg << "epochs=" << options.mlp_epochs << " learn_rate=" << format_double(options.mlp_learn_rate);
      break;
    }
    case ModelFamily::Svr: {
      const GridSearchResult g = svr_grid_search(X, y, options.svr_C_grid, options.svr_gamma_grid,
                                                 options.svr_epsilon, options.svr_folds, seed);
      model.params = encode_svr(g.best);
      model.svr = svr_fit(X, y, g.best);
      model.training.evaluations = g.cv_rmse.size();
      cfg << "folds=" << options.svr_folds << " epsilon=" << format_double(options.svr_epsilon);
      break;
    }
  }
  model.config = cfg.str();
  model.training_cost = objective_rmse(spec, X, y).evaluate(model.params);
  if (model.training.trace.empty()) model.training.trace.push_back(model.training_cost);
  model.training.best = model.params;
  model.training.best_cost = model.training_cost;
  return model;
}

MetricsReport evaluate(const TrainedModel& model, const LaggedDataset& data) {
  if (data.rows() == 0) throw InputError("cannot evaluate on an empty split");
  if (data.lags != model.lags) throw InputError("data lag layout does not match the model's selected lags");
  const std::vector<double> pred = model.predict_all(data.X);
  return compute_metrics(std::span<const double>(data.y.data(), data.rows()), pred);
}

}  // namespace gwl
