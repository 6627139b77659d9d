#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gwl/types.hpp"

namespace gwl {

/// Feed-forward network: logistic sigmoid on hidden layers, linear output.
struct MlpSpec {
  std::vector<int> widths{5, 10, 1};

  int n_inputs() const { return widths.front(); }
  int dimension() const;
  void validate() const;
};

struct MlpParams {
  std::vector<Matrix> weights;  // layer l: widths[l+1] x widths[l]
  std::vector<Vector> biases;   // layer l: widths[l+1]

  bool matches(const MlpSpec& spec) const;
};

double sigmoid(double v);

MlpParams mlp_zero_params(const MlpSpec& spec);
/// Uniform Glorot initialization.
MlpParams mlp_random_params(const MlpSpec& spec, std::uint64_t seed);

double mlp_forward(const MlpSpec& spec, const MlpParams& params, std::span<const double> x);
double mlp_mse(const MlpSpec& spec, const MlpParams& params, const Matrix& X, const Vector& y);

/// Backpropagated gradient of the mean squared error, same layout as params.
MlpParams mlp_gradient(const MlpSpec& spec, const MlpParams& params, const Matrix& X, const Vector& y);

struct MlpTrainResult {
  MlpParams params;
  std::vector<double> mse_trace;  // entry 0 = initial weights
  int best_epoch = 0;
};

/// Full-batch gradient descent; returns the weights of the best epoch.
MlpTrainResult mlp_backprop_train(const MlpSpec& spec, const Matrix& X, const Vector& y, int epochs,
                                  double learn_rate, std::uint64_t seed = 1);

}  // namespace gwl
