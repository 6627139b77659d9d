#include "gwl/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gwl/error.hpp"
#include "gwl/random.hpp"

namespace gwl {

void InputErrorModel::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InputError("input error: m must be positive");
  if (!(sigma_m >= 0.0) || !std::isfinite(sigma_m)) throw InputError("input error: sigma_m must be >= 0");
}

std::vector<double> perturb_series(std::span<const double> values, const InputErrorModel& error, std::uint64_t seed) {
  error.validate();
  Rng rng(seed);
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v *= rng.normal(error.m, error.sigma_m);
  return out;
}

Matrix perturb_inputs(const Matrix& X, const InputErrorModel& error, std::uint64_t seed) {
  error.validate();
  Rng rng(seed);
  Matrix out = X;
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] *= rng.normal(error.m, error.sigma_m);
  return out;
}

namespace {

constexpr double kPredictiveVarianceFloor = 1e-6;

double gaussian_loglik(double y, double mean, double var) {
  const double r = y - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

}  // namespace

CalibrationResult calibrate_input_error(const Predictor& predict, const Matrix& X, const Vector& y,
                                        const ErrorBounds& bounds, int budget, std::uint64_t seed, int replicates) {
  if (budget < 1) throw InputError("calibration budget must be >= 1");
  if (replicates < 2) throw InputError("calibration needs at least 2 replicates");
  if (X.rows() != y.size() || X.rows() == 0) throw InputError("calibration data is empty or misaligned");
  if (!(bounds.m_lo < bounds.m_hi) || !(bounds.sigma_lo < bounds.sigma_hi) || !(bounds.m_lo > 0.0) ||
      bounds.sigma_lo < 0.0) {
    throw InputError("calibration bounds need 0 < m_lo < m_hi and 0 <= sigma_lo < sigma_hi");
  }

  // Common random numbers: one standard normal per (replicate, entry).
  Rng noise(derive_seed(seed, 1));
  std::vector<Matrix> z(static_cast<std::size_t>(replicates), Matrix(X.rows(), X.cols()));
  for (Matrix& zr : z) {
    for (Eigen::Index i = 0; i < zr.size(); ++i) zr.data()[i] = noise.normal();
  }

  std::vector<double> row(static_cast<std::size_t>(X.cols()));
  auto loglik = [&](double m, double s) {
    double ll = 0.0;
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      double sum = 0.0, sum2 = 0.0;
      for (const Matrix& zr : z) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) row[static_cast<std::size_t>(c)] = X(r, c) * (m + s * zr(r, c));
        const double p = predict(row);
        sum += p;
        sum2 += p * p;
      }
      const double mean = sum / replicates;
      const double var = std::max(0.0, (sum2 - replicates * mean * mean) / (replicates - 1));
      ll += gaussian_loglik(y(r), mean, var + kPredictiveVarianceFloor);
    }
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
  };

  const double lo[2] = {bounds.m_lo, bounds.sigma_lo};
  const double hi[2] = {bounds.m_hi, bounds.sigma_hi};
  double best[2] = {(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0};
  CalibrationResult result;
  result.log_likelihood = loglik(best[0], best[1]);
  result.trace.push_back(result.log_likelihood);

  Rng rng(derive_seed(seed, 2));
  constexpr double kPerturbation = 0.2;
  for (int i = 1; i < budget; ++i) {
    const double p_select = budget > 2 ? 1.0 - std::log(static_cast<double>(i)) / std::log(static_cast<double>(budget - 1)) : 1.0;
    bool chosen[2] = {rng.uniform() < p_select, rng.uniform() < p_select};
    if (!chosen[0] && !chosen[1]) chosen[rng.below(2)] = true;
    double cand[2] = {best[0], best[1]};
    for (int d = 0; d < 2; ++d) {
      if (!chosen[d]) continue;
      double v = best[d] + kPerturbation * (hi[d] - lo[d]) * rng.normal();
      if (v < lo[d]) v = std::min(hi[d], lo[d] + (lo[d] - v));
      if (v > hi[d]) v = std::max(lo[d], hi[d] - (v - hi[d]));
      cand[d] = v;
    }
    const double ll = loglik(cand[0], cand[1]);
    if (ll >= result.log_likelihood) {
      result.log_likelihood = ll;
      best[0] = cand[0];
      best[1] = cand[1];
    }
    result.trace.push_back(result.log_likelihood);
  }
  result.error = {best[0], best[1]};
  return result;
}

Ensemble mc_ensemble(std::span<const TrainedModel> models, const Matrix& X_meters, int n_draws,
                     const InputErrorModel& error, std::uint64_t seed) {
  if (models.empty()) throw InputError("mc_ensemble: no models");
  if (n_draws < 2) throw InputError("mc_ensemble: need at least 2 draws");
  error.validate();
  Ensemble e;
  e.members.resize(X_meters.rows(), static_cast<Eigen::Index>(models.size()) * n_draws);
  Eigen::Index k = 0;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (int d = 0; d < n_draws; ++d, ++k) {
      const Matrix Xp = perturb_inputs(X_meters, error, derive_seed(seed, static_cast<std::uint64_t>(k)));
      const std::vector<double> pred = models[m].predict_all(Xp);
      for (Eigen::Index j = 0; j < Xp.rows(); ++j) e.members(j, k) = pred[static_cast<std::size_t>(j)];
      e.provenance.push_back(family_name(models[m].spec.family) + "-" + models[m].algorithm + " draw " +
                             std::to_string(d));
    }
  }
  return e;
}

namespace {

void check_ensemble(const Ensemble& e, std::size_t n_obs) {
  if (e.members.cols() == 0) throw InputError("ensemble has no members");
  if (static_cast<std::size_t>(e.members.rows()) != n_obs) {
    throw InputError("ensemble has " + std::to_string(e.members.rows()) + " rows but there are " +
                     std::to_string(n_obs) + " observations");
  }
  if (!e.members.allFinite()) throw NumericError("ensemble contains non-finite predictions");
}

// Per-(observation, member) log of w_k N(y_j | f_jk, s_k^2); returns the
// total log-likelihood and fills the responsibilities.
double e_step(const Ensemble& e, std::span<const double> obs, const std::vector<double>& w,
              const std::vector<double>& var, Matrix& resp) {
  const Eigen::Index K = e.members.cols();
  double total = 0.0;
  std::vector<double> logt(static_cast<std::size_t>(K));
  for (Eigen::Index j = 0; j < e.members.rows(); ++j) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      logt[kk] = w[kk] > 0.0 ? std::log(w[kk]) + gaussian_loglik(obs[static_cast<std::size_t>(j)], e.members(j, k), var[kk])
                             : -std::numeric_limits<double>::infinity();
      mx = std::max(mx, logt[kk]);
    }
    double s = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) s += std::exp(logt[static_cast<std::size_t>(k)] - mx);
    const double lse = mx + std::log(s);
    total += lse;
    for (Eigen::Index k = 0; k < K; ++k) resp(j, k) = std::exp(logt[static_cast<std::size_t>(k)] - lse);
  }
  return total;
}

}  // namespace

BmaFit bma_fit(const Ensemble& ensemble, std::span<const double> obs) {
  check_ensemble(ensemble, obs.size());
  const Eigen::Index n = ensemble.members.rows();
  const Eigen::Index K = ensemble.members.cols();
  if (n == 0) throw InputError("bma_fit: no observations");

  std::vector<double> w(static_cast<std::size_t>(K), 1.0 / static_cast<double>(K));
  std::vector<double> var(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) {
    double ss = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = obs[static_cast<std::size_t>(j)] - ensemble.members(j, k);
      ss += r * r;
    }
    var[static_cast<std::size_t>(k)] = std::max(kBmaVarianceFloor, ss / static_cast<double>(n));
  }

  BmaFit fit;
  Matrix resp(n, K);
  double ll = e_step(ensemble, obs, w, var, resp);
  fit.ll_trace.push_back(ll);
  constexpr int kMaxIterations = 500;
  constexpr double kTolerance = 1e-8;
  for (int it = 1; it <= kMaxIterations; ++it) {
    double wsum = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      double rk = 0.0, ss = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double r = obs[static_cast<std::size_t>(j)] - ensemble.members(j, k);
        rk += resp(j, k);
        ss += resp(j, k) * r * r;
      }
      w[kk] = rk / static_cast<double>(n);
      if (rk > 0.0) var[kk] = std::max(kBmaVarianceFloor, ss / rk);
      wsum += w[kk];
    }
    for (double& wk : w) wk /= wsum;
    const double next = e_step(ensemble, obs, w, var, resp);
    fit.ll_trace.push_back(next);
    fit.iterations = it;
    const double gain = next - ll;
    ll = next;
    if (gain < kTolerance) break;
  }
  fit.weights = w;
  for (double v : var) fit.sigmas.push_back(std::sqrt(v));
  fit.log_likelihood = ll;
  return fit;
}

BandMode parse_band_mode(const std::string& name) {
  if (name == "bma") return BandMode::Bma;
  if (name == "quantile") return BandMode::Quantile;
  throw InputError("unknown band mode '" + name + "' (expected bma or quantile)");
}

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("band level must lie in (0, 1)");
}

// Type-7 quantile of sorted values.
double sorted_quantile(const std::vector<double>& v, double q) {
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Band interval_bounds(const Ensemble& ensemble, std::span<const double> weights, std::span<const double> sigmas,
                     double level) {
  check_level(level);
  const auto K = static_cast<std::size_t>(ensemble.members.cols());
  if (weights.size() != K || sigmas.size() != K) throw InputError("interval_bounds: weights/sigmas do not match members");
  double wsum = 0.0;
  int effective = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (!(weights[k] >= 0.0) || !(sigmas[k] >= 0.0)) throw InputError("interval_bounds: negative weight or spread");
    wsum += weights[k];
    effective += weights[k] > 0.0;
  }
  if (effective < 2) throw InputError("interval_bounds: fewer than 2 members carry weight");
  if (std::abs(wsum - 1.0) > 1e-9) throw InputError("interval_bounds: weights must sum to 1");

  // Stratum u falls into member k where the cumulative weight crosses u;
  // the conditional position inside that member's share is pushed through
  // the member's normal inverse CDF.
  const boost::math::normal_distribution<double> unit;
  std::vector<std::size_t> member(kBandStrata);
  std::vector<double> offset(kBandStrata);
  std::vector<double> cum(K);
  double c = 0.0;
  for (std::size_t k = 0; k < K; ++k) cum[k] = (c += weights[k]);
  std::size_t last = K - 1;
  while (weights[last] == 0.0) --last;
  std::size_t k = 0;
  for (int s = 0; s < kBandStrata; ++s) {
    const double u = (s + 0.5) / kBandStrata;
    while (k < last && (u >= cum[k] || weights[k] == 0.0)) ++k;
    const double start = cum[k] - weights[k];
    const double inner = std::clamp((u - start) / weights[k], 1e-12, 1.0 - 1e-12);
    member[static_cast<std::size_t>(s)] = k;
    offset[static_cast<std::size_t>(s)] = boost::math::quantile(unit, inner);
  }

  Band band;
  std::vector<double> draws(kBandStrata);
  const double tail = (1.0 - level) / 2.0;
  for (Eigen::Index j = 0; j < ensemble.members.rows(); ++j) {
    for (int s = 0; s < kBandStrata; ++s) {
      const std::size_t m = member[static_cast<std::size_t>(s)];
      draws[static_cast<std::size_t>(s)] =
          ensemble.members(j, static_cast<Eigen::Index>(m)) + sigmas[m] * offset[static_cast<std::size_t>(s)];
    }
    std::sort(draws.begin(), draws.end());
    band.lower.push_back(sorted_quantile(draws, tail));
    band.upper.push_back(sorted_quantile(draws, 1.0 - tail));
  }
  return band;
}

Band quantile_bounds(const Ensemble& ensemble, double level) {
  check_level(level);
  if (ensemble.members.cols() < 2) throw InputError("quantile band needs at least 2 members");
  Band band;
  const double tail = (1.0 - level) / 2.0;
  std::vector<double> v(static_cast<std::size_t>(ensemble.members.cols()));
  for (Eigen::Index j = 0; j < ensemble.members.rows(); ++j) {
    for (Eigen::Index k = 0; k < ensemble.members.cols(); ++k) v[static_cast<std::size_t>(k)] = ensemble.members(j, k);
    std::sort(v.begin(), v.end());
    band.lower.push_back(sorted_quantile(v, tail));
    band.upper.push_back(sorted_quantile(v, 1.0 - tail));
  }
  return band;
}

namespace {

void check_band(std::span<const double> obs, const Band& band) {
  if (band.lower.size() != obs.size() || band.upper.size() != obs.size()) {
    throw InputError("band length " + std::to_string(band.lower.size()) + " does not match " +
                     std::to_string(obs.size()) + " observations");
  }
  if (obs.empty()) throw InputError("no observations");
}

}  // namespace

double p_factor(std::span<const double> obs, const Band& band) {
  check_band(obs, band);
  std::size_t inside = 0;
  for (std::size_t j = 0; j < obs.size(); ++j) inside += band.lower[j] <= obs[j] && obs[j] <= band.upper[j];
  return static_cast<double>(inside) / static_cast<double>(obs.size());
}

double d_factor(std::span<const double> obs, const Band& band) {
  check_band(obs, band);
  if (obs.size() < 2) throw InputError("d-factor needs at least 2 observations");
  double mean = 0.0, width = 0.0;
  for (std::size_t j = 0; j < obs.size(); ++j) {
    mean += obs[j];
    width += band.upper[j] - band.lower[j];
  }
  mean /= static_cast<double>(obs.size());
  width /= static_cast<double>(obs.size());
  double ss = 0.0;
  for (double o : obs) ss += (o - mean) * (o - mean);
  const double sd = std::sqrt(ss / static_cast<double>(obs.size() - 1));
  if (!(sd > 0.0)) throw InputError("d-factor undefined: observations are constant");
  return width / sd;
}

}  // namespace gwl
