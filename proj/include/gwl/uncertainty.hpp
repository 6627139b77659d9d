#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gwl/trainer.hpp"

namespace gwl {

/// Multiplicative input error: each input value is scaled by K ~ N(m, sigma_m^2).
struct InputErrorModel {
  double m = 1.0;
  double sigma_m = 0.0;

  void validate() const;
};

std::vector<double> perturb_series(std::span<const double> values, const InputErrorModel& error, std::uint64_t seed);
/// Independent multiplier for every entry of X.
Matrix perturb_inputs(const Matrix& X, const InputErrorModel& error, std::uint64_t seed);

struct ErrorBounds {
  double m_lo = 0.9, m_hi = 1.1;
  double sigma_lo = 0.0, sigma_hi = 0.1;
};

struct CalibrationResult {
  InputErrorModel error;
  double log_likelihood = 0.0;
  std::vector<double> trace;  // incumbent log-likelihood after each evaluation
};

using Predictor = std::function<double(std::span<const double>)>;

/// Dynamically dimensioned search over (m, sigma_m), starting from the
/// centre of the bounds. The objective is the Gaussian log-likelihood of y
/// under the predictive mean and variance of `replicates` perturbed
/// forward passes; the perturbations reuse one set of standard normal draws
/// for every candidate.
CalibrationResult calibrate_input_error(const Predictor& predict, const Matrix& X, const Vector& y,
                                        const ErrorBounds& bounds, int budget, std::uint64_t seed,
                                        int replicates = 32);

struct Ensemble {
  Matrix members;                       // observation x member, meters
  std::vector<std::string> provenance;  // one label per member
};

/// Members ordered model-major: member k = model * n_draws + draw.
Ensemble mc_ensemble(std::span<const TrainedModel> models, const Matrix& X_meters, int n_draws,
                     const InputErrorModel& error, std::uint64_t seed);

struct BmaFit {
  std::vector<double> weights;
  std::vector<double> sigmas;
  double log_likelihood = 0.0;
  std::vector<double> ll_trace;  // entry 0 = initial guess
  int iterations = 0;
};

inline constexpr double kBmaVarianceFloor = 1e-6;

/// EM for a Gaussian mixture centred on the member predictions, with one
/// spread per member. Stops when the log-likelihood gain drops below 1e-8
/// or after 500 iterations.
BmaFit bma_fit(const Ensemble& ensemble, std::span<const double> obs);

struct Band {
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class BandMode { Bma, Quantile };
BandMode parse_band_mode(const std::string& name);

inline constexpr int kBandStrata = 4096;

/// Central `level` interval of the weighted mixture per observation, from
/// kBandStrata stratified draws through the mixture's inverse CDF.
Band interval_bounds(const Ensemble& ensemble, std::span<const double> weights, std::span<const double> sigmas,
                     double level = 0.95);

/// Central `level` interval of the raw member predictions.
Band quantile_bounds(const Ensemble& ensemble, double level = 0.95);

double p_factor(std::span<const double> obs, const Band& band);
/// Mean band width over the sample standard deviation of obs.
double d_factor(std::span<const double> obs, const Band& band);

}  // namespace gwl
