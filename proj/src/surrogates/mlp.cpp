#include "gwl/surrogates/mlp.hpp"

#include <cmath>
#include <string>

#include "gwl/error.hpp"
#include "gwl/random.hpp"

namespace gwl {

int MlpSpec::dimension() const {
  int d = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) d += widths[l] * widths[l + 1] + widths[l + 1];
  return d;
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw InputError("MLP: need at least input and output layers");
  for (int w : widths) {
    if (w < 1) throw InputError("MLP: layer widths must be positive");
  }
  if (widths.back() != 1) throw InputError("MLP: output layer must have width 1");
}

bool MlpParams::matches(const MlpSpec& spec) const {
  if (weights.size() + 1 != spec.widths.size() || biases.size() != weights.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != spec.widths[l + 1] || weights[l].cols() != spec.widths[l]) return false;
    if (biases[l].size() != spec.widths[l + 1]) return false;
  }
  return true;
}

double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

MlpParams mlp_zero_params(const MlpSpec& spec) {
  spec.validate();
  MlpParams p;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    p.weights.push_back(Matrix::Zero(spec.widths[l + 1], spec.widths[l]));
    p.biases.push_back(Vector::Zero(spec.widths[l + 1]));
  }
  return p;
}

MlpParams mlp_random_params(const MlpSpec& spec, std::uint64_t seed) {
  MlpParams p = mlp_zero_params(spec);
  Rng rng(seed);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double limit = std::sqrt(6.0 / (spec.widths[l] + spec.widths[l + 1]));
    for (Eigen::Index i = 0; i < p.weights[l].size(); ++i) p.weights[l].data()[i] = rng.uniform(-limit, limit);
  }
  return p;
}

namespace {

// Activations of every layer, input first.
std::vector<Vector> forward_all(const MlpSpec& spec, const MlpParams& params, std::span<const double> x) {
  if (!params.matches(spec)) throw InputError("MLP: parameters do not match the spec");
  if (static_cast<int>(x.size()) != spec.n_inputs()) {
    throw InputError("MLP: expected " + std::to_string(spec.n_inputs()) + " inputs, got " + std::to_string(x.size()));
  }
  std::vector<Vector> act;
  act.reserve(params.weights.size() + 1);
  act.emplace_back(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    Vector z = params.weights[l] * act.back() + params.biases[l];
    if (l + 1 < params.weights.size()) z = z.unaryExpr([](double v) { return sigmoid(v); });
    act.push_back(std::move(z));
  }
  return act;
}

}  // namespace

double mlp_forward(const MlpSpec& spec, const MlpParams& params, std::span<const double> x) {
  return forward_all(spec, params, x).back()(0);
}

double mlp_mse(const MlpSpec& spec, const MlpParams& params, const Matrix& X, const Vector& y) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const double e = mlp_forward(spec, params, row_span(X, r)) - y(r);
    s += e * e;
  }
  return s / static_cast<double>(X.rows());
}

MlpParams mlp_gradient(const MlpSpec& spec, const MlpParams& params, const Matrix& X, const Vector& y) {
  MlpParams grad = mlp_zero_params(spec);
  const double scale = 2.0 / static_cast<double>(X.rows());
  const std::size_t layers = params.weights.size();
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const std::vector<Vector> act = forward_all(spec, params, row_span(X, r));
    // delta = d loss / d (pre-activation) of the current layer.
    Vector delta(1);
    delta(0) = scale * (act.back()(0) - y(r));
    for (std::size_t l = layers; l-- > 0;) {
      grad.weights[l].noalias() += delta * act[l].transpose();
      grad.biases[l] += delta;
      if (l > 0) {
        const Vector& h = act[l];
        delta = (params.weights[l].transpose() * delta).cwiseProduct(h.cwiseProduct(Vector::Ones(h.size()) - h));
      }
    }
  }
  return grad;
}

MlpTrainResult mlp_backprop_train(const MlpSpec& spec, const Matrix& X, const Vector& y, int epochs,
                                  double learn_rate, std::uint64_t seed) {
  spec.validate();
  if (epochs < 1) throw InputError("mlp_backprop_train: epochs must be >= 1");
  if (X.cols() != spec.n_inputs()) throw InputError("mlp_backprop_train: input width does not match spec");

  MlpTrainResult result;
  MlpParams current = mlp_random_params(spec, seed);
  double best = mlp_mse(spec, current, X, y);
  if (!std::isfinite(best)) throw NumericError("mlp_backprop_train: non-finite loss at initialization");
  result.params = current;
  result.mse_trace.push_back(best);

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    const MlpParams grad = mlp_gradient(spec, current, X, y);
    for (std::size_t l = 0; l < current.weights.size(); ++l) {
      current.weights[l] -= learn_rate * grad.weights[l];
      current.biases[l] -= learn_rate * grad.biases[l];
    }
    const double mse = mlp_mse(spec, current, X, y);
    if (!std::isfinite(mse)) {
      throw NumericError("mlp_backprop_train: non-finite loss at epoch " + std::to_string(epoch) +
                         " (learning rate " + std::to_string(learn_rate) + ")");
    }
    result.mse_trace.push_back(mse);
    if (mse < best) {
      best = mse;
      result.params = current;
      result.best_epoch = epoch;
    }
  }
  return result;
}

}  // namespace gwl
