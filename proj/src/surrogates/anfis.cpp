#include "gwl/surrogates/anfis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gwl/error.hpp"

namespace gwl {

double bell_mf(double x, const BellParams& p) {
  if (p.a == 0.0) throw InputError("bell_mf: width a must be nonzero");
  const double z = (x - p.c) / p.a;
  return 1.0 / (1.0 + std::pow(z * z, p.b));
}

int AnfisSpec::rules() const {
  int r = 1;
  for (int i = 0; i < n_inputs; ++i) r *= mfs_per_input;
  return r;
}

void AnfisSpec::validate() const {
  if (n_inputs < 1) throw InputError("ANFIS: need at least one input");
  if (mfs_per_input < 1) throw InputError("ANFIS: need at least one membership function per input");
  if (std::pow(static_cast<double>(mfs_per_input), n_inputs) > 65536.0) {
    throw InputError("ANFIS: rule base larger than 65536 rules");
  }
}

bool AnfisParams::matches(const AnfisSpec& spec) const {
  return static_cast<int>(premise.size()) == spec.premise_count() && consequent.rows() == spec.rules() &&
         consequent.cols() == spec.n_inputs + 1;
}

namespace {

void check_shapes(const AnfisSpec& spec, const AnfisParams& params, std::span<const double> x) {
  if (!params.matches(spec)) throw InputError("ANFIS: parameters do not match the spec");
  if (static_cast<int>(x.size()) != spec.n_inputs) {
    throw InputError("ANFIS: expected " + std::to_string(spec.n_inputs) + " inputs, got " + std::to_string(x.size()));
  }
}

// mu[i * mfs + k] for one sample.
std::vector<double> memberships(const AnfisSpec& spec, const AnfisParams& params, std::span<const double> x) {
  std::vector<double> mu(static_cast<std::size_t>(spec.premise_count()));
  for (int i = 0; i < spec.n_inputs; ++i) {
    for (int k = 0; k < spec.mfs_per_input; ++k) {
      const auto idx = static_cast<std::size_t>(i * spec.mfs_per_input + k);
      mu[idx] = bell_mf(x[static_cast<std::size_t>(i)], params.premise[idx]);
    }
  }
  return mu;
}

// Index into mu of the membership that rule r uses for input i.
inline std::size_t rule_mf(const AnfisSpec& spec, int rule, int input) {
  int digit = rule;
  for (int j = 0; j < input; ++j) digit /= spec.mfs_per_input;
  return static_cast<std::size_t>(input * spec.mfs_per_input + digit % spec.mfs_per_input);
}

std::vector<double> strengths_from(const AnfisSpec& spec, const std::vector<double>& mu) {
  const int rules = spec.rules();
  std::vector<double> w(static_cast<std::size_t>(rules));
  for (int r = 0; r < rules; ++r) {
    double prod = 1.0;
    int digit = r;
    for (int i = 0; i < spec.n_inputs; ++i) {
      prod *= mu[static_cast<std::size_t>(i * spec.mfs_per_input + digit % spec.mfs_per_input)];
      digit /= spec.mfs_per_input;
    }
    w[static_cast<std::size_t>(r)] = prod;
  }
  return w;
}

double rule_output(const AnfisParams& params, int rule, std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  double z = params.consequent(rule, n);
  for (Eigen::Index j = 0; j < n; ++j) z += params.consequent(rule, j) * x[static_cast<std::size_t>(j)];
  return z;
}

}  // namespace

std::vector<double> rule_strengths(const AnfisSpec& spec, const AnfisParams& params, std::span<const double> x) {
  check_shapes(spec, params, x);
  return strengths_from(spec, memberships(spec, params, x));
}

std::vector<double> normalized_strengths(const AnfisSpec& spec, const AnfisParams& params,
                                         std::span<const double> x) {
  std::vector<double> w = rule_strengths(spec, params, x);
  double total = 0.0;
  for (double v : w) total += v;
  const double denom = std::max(total, kFiringFloor);
  for (double& v : w) v /= denom;
  return w;
}

double anfis_forward(const AnfisSpec& spec, const AnfisParams& params, std::span<const double> x) {
  const std::vector<double> w = rule_strengths(spec, params, x);
  double total = 0.0, weighted = 0.0;
  for (int r = 0; r < spec.rules(); ++r) {
    const double wr = w[static_cast<std::size_t>(r)];
    total += wr;
    if (wr != 0.0) weighted += wr * rule_output(params, r, x);
  }
  if (total == 0.0) throw NumericError("degenerate firing");
  return weighted / std::max(total, kFiringFloor);
}

AnfisParams anfis_initial_params(const AnfisSpec& spec) {
  spec.validate();
  AnfisParams params;
  params.premise.resize(static_cast<std::size_t>(spec.premise_count()));
  const int m = spec.mfs_per_input;
  const double spacing = m > 1 ? 1.0 / (m - 1) : 1.0;
  for (int i = 0; i < spec.n_inputs; ++i) {
    for (int k = 0; k < m; ++k) {
      const double center = m > 1 ? k * spacing : 0.5;
      params.premise[static_cast<std::size_t>(i * m + k)] = {spacing, 2.0, center};
    }
  }
  params.consequent = Matrix::Zero(spec.rules(), spec.n_inputs + 1);
  return params;
}

double anfis_mse(const AnfisSpec& spec, const AnfisParams& params, const Matrix& X, const Vector& y) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const double e = anfis_forward(spec, params, row_span(X, r)) - y(r);
    s += e * e;
  }
  return s / static_cast<double>(X.rows());
}

Matrix anfis_solve_consequents(const AnfisSpec& spec, const AnfisParams& params, const Matrix& X, const Vector& y,
                               bool* ridge_used) {
  const int rules = spec.rules();
  const int width = spec.n_inputs + 1;
  Eigen::MatrixXd A(X.rows(), rules * width);
  for (Eigen::Index s = 0; s < X.rows(); ++s) {
    const auto x = row_span(X, s);
    const std::vector<double> wbar = normalized_strengths(spec, params, x);
    for (int r = 0; r < rules; ++r) {
      const double wr = wbar[static_cast<std::size_t>(r)];
      for (int j = 0; j < spec.n_inputs; ++j) A(s, r * width + j) = wr * x[static_cast<std::size_t>(j)];
      A(s, r * width + spec.n_inputs) = wr;
    }
  }

  Eigen::VectorXd theta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const bool singular = qr.rank() < A.cols();
  if (!singular) {
    theta = qr.solve(y);
  } else {
    constexpr double kRidge = 1e-8;
    Eigen::MatrixXd normal = A.transpose() * A;
    normal.diagonal().array() += kRidge;
    theta = normal.ldlt().solve(A.transpose() * y);
  }
  if (ridge_used) *ridge_used = singular;

  Matrix out(rules, width);
  for (int r = 0; r < rules; ++r) {
    for (int j = 0; j < width; ++j) out(r, j) = theta(r * width + j);
  }
  return out;
}

std::vector<BellParams> anfis_premise_gradient(const AnfisSpec& spec, const AnfisParams& params, const Matrix& X,
                                               const Vector& y) {
  const int rules = spec.rules();
  std::vector<BellParams> grad(params.premise.size(), BellParams{0.0, 0.0, 0.0});
  const double scale = 2.0 / static_cast<double>(X.rows());

  for (Eigen::Index s = 0; s < X.rows(); ++s) {
    const auto x = row_span(X, s);
    check_shapes(spec, params, x);
    const std::vector<double> mu = memberships(spec, params, x);
    const std::vector<double> w = strengths_from(spec, mu);
    double total = 0.0, weighted = 0.0;
    std::vector<double> z(static_cast<std::size_t>(rules));
    for (int r = 0; r < rules; ++r) {
      z[static_cast<std::size_t>(r)] = rule_output(params, r, x);
      total += w[static_cast<std::size_t>(r)];
      weighted += w[static_cast<std::size_t>(r)] * z[static_cast<std::size_t>(r)];
    }
    const double denom = std::max(total, kFiringFloor);
    const double out = weighted / denom;
    const double dloss_dout = scale * (out - y(s));
    // Below the floor the denominator is constant, so d out / d w_r = z_r / floor.
    const bool floored = total < kFiringFloor;

    // d out / d mu_{ik} = sum over rules using (i,k) of (d out / d w_r) * prod of the rule's other memberships.
    std::vector<double> dout_dmu(mu.size(), 0.0);
    for (int r = 0; r < rules; ++r) {
      const double dout_dw = floored ? z[static_cast<std::size_t>(r)] / denom
                                     : (z[static_cast<std::size_t>(r)] - out) / denom;
      for (int i = 0; i < spec.n_inputs; ++i) {
        double others = 1.0;
        for (int j = 0; j < spec.n_inputs; ++j) {
          if (j != i) others *= mu[rule_mf(spec, r, j)];
        }
        dout_dmu[rule_mf(spec, r, i)] += dout_dw * others;
      }
    }

    for (int i = 0; i < spec.n_inputs; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      for (int k = 0; k < spec.mfs_per_input; ++k) {
        const auto idx = static_cast<std::size_t>(i * spec.mfs_per_input + k);
        const BellParams& p = params.premise[idx];
        const double m = mu[idx];
        const double d = xi - p.c;
        const double u = (d / p.a) * (d / p.a);
        if (u == 0.0) continue;  // at the center every partial vanishes (b > 0)
        const double t = std::pow(u, p.b);
        const double g = dloss_dout * dout_dmu[idx];
        grad[idx].a += g * 2.0 * p.b * t * m * m / p.a;
        grad[idx].c += g * 2.0 * p.b * t * m * m / d;
        grad[idx].b += g * (-t * std::log(u) * m * m);
      }
    }
  }
  return grad;
}

AnfisTrainResult anfis_classical_train(const AnfisSpec& spec, const Matrix& X, const Vector& y, int epochs,
                                       double learn_rate) {
  spec.validate();
  if (X.cols() != spec.n_inputs) throw InputError("anfis_classical_train: input width does not match spec");
  if (X.rows() < spec.rules()) {
    throw InputError("anfis_classical_train: need at least " + std::to_string(spec.rules()) + " training rows");
  }
  if (epochs < 0) throw InputError("anfis_classical_train: epochs must be >= 0");

  AnfisTrainResult result;
  AnfisParams current = anfis_initial_params(spec);
  bool ridge = false;
  current.consequent = anfis_solve_consequents(spec, current, X, y, &ridge);
  result.ridge_used = ridge;
  double best = anfis_mse(spec, current, X, y);
  result.params = current;
  result.mse_trace.push_back(best);

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    const std::vector<BellParams> grad = anfis_premise_gradient(spec, current, X, y);
    for (std::size_t i = 0; i < current.premise.size(); ++i) {
      BellParams& p = current.premise[i];
      p.a = std::max(p.a - learn_rate * grad[i].a, 1e-3);
      p.b = std::max(p.b - learn_rate * grad[i].b, 1e-2);
      p.c -= learn_rate * grad[i].c;
    }
    current.consequent = anfis_solve_consequents(spec, current, X, y, &ridge);
    result.ridge_used = result.ridge_used || ridge;
    double mse = std::numeric_limits<double>::infinity();
    try {
      mse = anfis_mse(spec, current, X, y);
    } catch (const NumericError&) {
    }
    if (!std::isfinite(mse)) mse = std::numeric_limits<double>::infinity();
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
