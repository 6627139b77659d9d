#pragma once

#include <span>
#include <vector>

#include "gwl/types.hpp"

namespace gwl {

/// Generalized bell membership parameters.
struct BellParams {
  double a = 1.0;  // width, > 0
  double b = 2.0;  // shape, > 0
  double c = 0.0;  // center
};

/// 1 / (1 + ((x - c) / a)^2)^b. Throws on a == 0.
double bell_mf(double x, const BellParams& p);

/// Grid-partitioned first-order Sugeno system.
struct AnfisSpec {
  int n_inputs = 5;
  int mfs_per_input = 2;

  int rules() const;
  int premise_count() const { return n_inputs * mfs_per_input; }
  int consequent_count() const { return rules() * (n_inputs + 1); }
  int dimension() const { return 3 * premise_count() + consequent_count(); }
  void validate() const;
};

/// Rule r combines, for every input i, membership function
/// (r / mfs^i) % mfs of that input; input 0 varies fastest.
struct AnfisParams {
  std::vector<BellParams> premise;  // index i * mfs_per_input + k
  Matrix consequent;                // rules x (n_inputs + 1): p_1..p_n, r

  bool matches(const AnfisSpec& spec) const;
};

/// Firing strengths of every rule (layer 2 output).
std::vector<double> rule_strengths(const AnfisSpec& spec, const AnfisParams& params, std::span<const double> x);

/// Normalized firing strengths (layer 3). The denominator is floored at
/// kFiringFloor so inputs far outside every membership never divide by zero.
std::vector<double> normalized_strengths(const AnfisSpec& spec, const AnfisParams& params,
                                         std::span<const double> x);

inline constexpr double kFiringFloor = 1e-12;

/// Layer 5 output. Throws NumericError("degenerate firing") when every
/// rule strength underflows to exactly zero.
double anfis_forward(const AnfisSpec& spec, const AnfisParams& params, std::span<const double> x);

/// Centers equally spaced over [0,1], widths equal to the spacing, b = 2;
/// consequents zero.
AnfisParams anfis_initial_params(const AnfisSpec& spec);

struct AnfisTrainResult {
  AnfisParams params;
  std::vector<double> mse_trace;  // one entry per evaluated epoch, entry 0 = initial LSE
  int best_epoch = 0;
  bool ridge_used = false;
};

/// Hybrid learning: consequents by least squares with premises fixed, then
/// one gradient step on the premises per epoch. Returns the best epoch.
AnfisTrainResult anfis_classical_train(const AnfisSpec& spec, const Matrix& X, const Vector& y, int epochs,
                                       double learn_rate);

/// Least-squares consequents for fixed premises; ridge 1e-8 if singular.
Matrix anfis_solve_consequents(const AnfisSpec& spec, const AnfisParams& params, const Matrix& X, const Vector& y,
                               bool* ridge_used = nullptr);

/// Gradient of the mean squared training error w.r.t. (a, b, c) of every
/// membership function, laid out like `premise`.
std::vector<BellParams> anfis_premise_gradient(const AnfisSpec& spec, const AnfisParams& params, const Matrix& X,
                                               const Vector& y);

double anfis_mse(const AnfisSpec& spec, const AnfisParams& params, const Matrix& X, const Vector& y);

}  // namespace gwl
