#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwl/error.hpp"
#include "gwl/uncertainty.hpp"
#include "support.hpp"

using namespace gwl;
using namespace gwl::test;

namespace {

// Single-rule ANFIS with identity scaling: prediction = sum_i p_i x_i + r.
TrainedModel linear_model(std::vector<double> slopes, double intercept) {
  TrainedModel m;
  const int n = static_cast<int>(slopes.size());
  m.spec.family = ModelFamily::Anfis;
  m.spec.anfis.mfs_per_input = 1;
  m.spec.set_inputs(n);
  AnfisParams p = anfis_initial_params(m.spec.anfis);
  for (int i = 0; i < n; ++i) p.consequent(0, i) = slopes[static_cast<std::size_t>(i)];
  p.consequent(0, n) = intercept;
  m.params = encode_anfis(m.spec.anfis, p);
  m.scaler.features.assign(slopes.size(), ColumnRange{0.0, 1.0});
  m.scaler.target = {0.0, 1.0};
  for (int i = 1; i <= n; ++i) m.lags.push_back(i);
  m.algorithm = "fixture";
  return m;
}

Ensemble from_columns(const std::vector<std::vector<double>>& columns) {
  Ensemble e;
  e.members.resize(static_cast<Eigen::Index>(columns.front().size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    for (std::size_t j = 0; j < columns[k].size(); ++j) {
      e.members(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = columns[k][j];
    }
    e.provenance.push_back("m" + std::to_string(k));
  }
  return e;
}

double mean_width(const Band& b) {
  double w = 0.0;
  for (std::size_t j = 0; j < b.lower.size(); ++j) w += b.upper[j] - b.lower[j];
  return w / static_cast<double>(b.lower.size());
}

}  // namespace

TEST_CASE("perturb_series trivial multipliers and sample mean") {
  const std::vector<double> v{1.0, -2.5, 3.25, 0.0};
  CHECK(perturb_series(v, {1.0, 0.0}, 5) == v);
  const auto doubled = perturb_series(v, {2.0, 0.0}, 5);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(doubled[i] == 2.0 * v[i]);

  const std::vector<double> ones(10000, 1.0);
  const auto k = perturb_series(ones, {1.0, 0.05}, 17);
  const double mean = std::accumulate(k.begin(), k.end(), 0.0) / 10000.0;
  CHECK(std::abs(mean - 1.0) <= 0.002);
  CHECK(perturb_series(ones, {1.0, 0.05}, 17) == k);

  CHECK_THROWS_AS(perturb_series(v, {0.0, 0.1}, 1), InputError);
  CHECK_THROWS_AS(perturb_series(v, {1.0, -0.1}, 1), InputError);
}

TEST_CASE("perturb_inputs draws one multiplier per entry") {
  Matrix X = Matrix::Ones(50, 3);
  const Matrix P = perturb_inputs(X, {1.0, 0.1}, 3);
  CHECK(P.rows() == 50);
  CHECK(P.cols() == 3);
  CHECK(P(0, 0) != P(0, 1));
  CHECK(perturb_inputs(X, {1.0, 0.0}, 3) == X);
}

TEST_CASE("calibration budget 1 returns the initial point") {
  TestRng rng(4);
  const Matrix X = random_matrix(rng, 40, 2, 5.0, 10.0);
  Vector y(40);
  for (int r = 0; r < 40; ++r) y(r) = X(r, 0) + X(r, 1);
  const Predictor sum = [](std::span<const double> x) { return x[0] + x[1]; };
  const ErrorBounds b{0.8, 1.2, 0.0, 0.2};
  const CalibrationResult res = calibrate_input_error(sum, X, y, b, 1, 9);
  CHECK(res.error.m == doctest::Approx(1.0));
  CHECK(res.error.sigma_m == doctest::Approx(0.1));
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0] == res.log_likelihood);
  CHECK_THROWS_AS(calibrate_input_error(sum, X, y, b, 0, 9), InputError);
}

TEST_CASE("calibration recovers a known multiplier with a monotone incumbent") {
  TestRng rng(6);
  const int n = 150, c = 4;
  const Matrix X = random_matrix(rng, n, c, 5.0, 15.0);
  const Matrix Xp = perturb_inputs(X, {1.02, 0.03}, 77);
  const Predictor sum = [](std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); };
  Vector y(n);
  for (int r = 0; r < n; ++r) y(r) = sum(row_span(Xp, r));

  const CalibrationResult res = calibrate_input_error(sum, X, y, {}, 200, 3);
  CHECK(res.trace.size() == 200);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] >= res.trace[i - 1]);
  CHECK(std::abs(res.error.m - 1.02) <= 0.02);
  CHECK(res.error.sigma_m >= 0.0);
  CHECK(res.error.sigma_m <= 0.1);

  const CalibrationResult again = calibrate_input_error(sum, X, y, {}, 200, 3);
  CHECK(again.error.m == res.error.m);
  CHECK(again.error.sigma_m == res.error.sigma_m);
}

TEST_CASE("mc_ensemble counts, provenance and zero spread") {
  TestRng rng(8);
  const Matrix X = random_matrix(rng, 12, 2, 1.0, 3.0);
  const TrainedModel a = linear_model({0.5, 0.25}, 0.1);
  const std::vector<TrainedModel> one{a};
  const Ensemble e0 = mc_ensemble(one, X, 4, {1.0, 0.0}, 1);
  const std::vector<double> point = a.predict_all(X);
  REQUIRE(e0.members.cols() == 4);
  for (int j = 0; j < 12; ++j) {
    CHECK(point[static_cast<std::size_t>(j)] == doctest::Approx(0.5 * X(j, 0) + 0.25 * X(j, 1) + 0.1).epsilon(1e-12));
    for (int k = 0; k < 4; ++k) CHECK(e0.members(j, k) == point[static_cast<std::size_t>(j)]);
  }

  const std::vector<TrainedModel> three{a, linear_model({1.0, 0.0}, 0.0), linear_model({0.0, 1.0}, -0.5)};
  const Ensemble e = mc_ensemble(three, X, 10, {1.0, 0.05}, 2);
  CHECK(e.members.cols() == 30);
  CHECK(e.members.rows() == 12);
  CHECK(e.provenance.size() == 30);
  CHECK(e.members.allFinite());
  CHECK(mc_ensemble(three, X, 10, {1.0, 0.05}, 2).members == e.members);

  CHECK_THROWS_AS(mc_ensemble(three, X, 1, {1.0, 0.05}, 2), InputError);
  CHECK_THROWS_AS(mc_ensemble(std::span<const TrainedModel>{}, X, 4, {1.0, 0.05}, 2), InputError);
}

TEST_CASE("member spread grows with the multiplier spread") {
  TestRng rng(9);
  const Matrix X = random_matrix(rng, 30, 2, 5.0, 10.0);
  const std::vector<TrainedModel> models{linear_model({0.6, 0.4}, 0.0)};
  const Band narrow = quantile_bounds(mc_ensemble(models, X, 40, {1.0, 0.01}, 11));
  const Band wide = quantile_bounds(mc_ensemble(models, X, 40, {1.0, 0.1}, 11));
  CHECK(mean_width(wide) > mean_width(narrow));
}

TEST_CASE("bma_fit on trivial and constructed ensembles") {
  TestRng rng(12);
  std::vector<double> obs(60), good(60), bad(60);
  for (int j = 0; j < 60; ++j) {
    obs[static_cast<std::size_t>(j)] = rng.uniform(0.0, 10.0);
    good[static_cast<std::size_t>(j)] = obs[static_cast<std::size_t>(j)] + 1e-4 * rng.normal();
    bad[static_cast<std::size_t>(j)] = obs[static_cast<std::size_t>(j)] + 50.0 * rng.normal();
  }

  const BmaFit single = bma_fit(from_columns({good}), obs);
  REQUIRE(single.weights.size() == 1);
  CHECK(single.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const BmaFit pair = bma_fit(from_columns({good, bad}), obs);
  CHECK(pair.weights[0] > 0.99);
  CHECK(std::abs(pair.weights[0] + pair.weights[1] - 1.0) <= 1e-9);
  for (double s : pair.sigmas) CHECK(s > 0.0);
  for (std::size_t i = 1; i < pair.ll_trace.size(); ++i) CHECK(pair.ll_trace[i] >= pair.ll_trace[i - 1] - 1e-9);

  CHECK_THROWS_AS(bma_fit(from_columns({good}), std::vector<double>(59, 0.0)), InputError);
}

TEST_CASE("bma_fit keeps weights on the simplex with a monotone likelihood") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    TestRng rng(seed);
    const int n = 40, K = 2 + static_cast<int>(seed % 4);
    std::vector<double> obs(n);
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(K), std::vector<double>(n));
    for (int j = 0; j < n; ++j) {
      obs[static_cast<std::size_t>(j)] = rng.normal(5.0, 2.0);
      for (int k = 0; k < K; ++k) {
        cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
            obs[static_cast<std::size_t>(j)] + rng.normal(0.2 * k, 0.3 + 0.5 * k);
      }
    }
    const BmaFit fit = bma_fit(from_columns(cols), obs);
    const double sum = std::accumulate(fit.weights.begin(), fit.weights.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    for (double w : fit.weights) CHECK(w >= 0.0);
    for (std::size_t i = 1; i < fit.ll_trace.size(); ++i) CHECK(fit.ll_trace[i] >= fit.ll_trace[i - 1] - 1e-9);
    CHECK(fit.log_likelihood == fit.ll_trace.back());
    CHECK(fit.iterations <= 500);
  }
}

TEST_CASE("interval_bounds degenerate, symmetric and nested bands") {
  const Ensemble same = from_columns({{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}});
  const std::vector<double> w3{0.2, 0.3, 0.5}, tiny3(3, 1e-9);
  const Band flat = interval_bounds(same, w3, tiny3);
  CHECK(flat.lower[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(flat.upper[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(flat.lower[1] == doctest::Approx(-2.0).epsilon(1e-8));

  const Ensemble sym = from_columns({{-1.0}, {1.0}});
  const std::vector<double> half{0.5, 0.5}, tiny2(2, 1e-6);
  const Band b = interval_bounds(sym, half, tiny2);
  CHECK(b.lower[0] == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(b.upper[0] == doctest::Approx(1.0).epsilon(1e-4));

  const std::vector<double> sds{0.5, 0.5};
  const Band wide = interval_bounds(sym, half, sds, 0.95);
  CHECK(wide.lower[0] == doctest::Approx(mixture_quantile({-1.0, 1.0}, sds, half, 0.025)).epsilon(5e-3));
  CHECK(wide.upper[0] == doctest::Approx(mixture_quantile({-1.0, 1.0}, sds, half, 0.975)).epsilon(5e-3));

  CHECK_THROWS_AS(interval_bounds(sym, std::vector<double>{1.0, 0.0}, sds), InputError);
  CHECK_THROWS_AS(interval_bounds(sym, std::vector<double>{0.6, 0.6}, sds), InputError);
  CHECK_THROWS_AS(interval_bounds(sym, half, sds, 1.0), InputError);
}

TEST_CASE("interval_bounds matches the mixture quantile oracle and nests by level") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    TestRng rng(seed);
    const int K = 2 + static_cast<int>(seed % 3);
    std::vector<double> means(K), sds(K), w(K);
    std::vector<std::vector<double>> cols;
    double wsum = 0.0;
    for (int k = 0; k < K; ++k) {
      means[k] = rng.uniform(-3.0, 3.0);
      sds[k] = rng.uniform(0.2, 1.5);
      w[k] = rng.uniform(0.1, 1.0);
      wsum += w[k];
      cols.push_back({means[k]});
    }
    for (double& x : w) x /= wsum;
    const Ensemble e = from_columns(cols);
    const Band b95 = interval_bounds(e, w, sds, 0.95);
    const Band b99 = interval_bounds(e, w, sds, 0.99);
    const double spread = *std::max_element(sds.begin(), sds.end());
    CHECK(std::abs(b95.lower[0] - mixture_quantile(means, sds, w, 0.025)) <= 0.02 * spread);
    CHECK(std::abs(b95.upper[0] - mixture_quantile(means, sds, w, 0.975)) <= 0.02 * spread);
    CHECK(b99.lower[0] <= b95.lower[0]);
    CHECK(b99.upper[0] >= b95.upper[0]);
    CHECK(b95.lower[0] <= b95.upper[0]);
  }
}

TEST_CASE("quantile_bounds over raw members") {
  const Ensemble e = from_columns({{0.0}, {1.0}, {2.0}, {3.0}, {4.0}});
  const Band b = quantile_bounds(e, 0.5);
  CHECK(b.lower[0] == doctest::Approx(1.0));
  CHECK(b.upper[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(quantile_bounds(from_columns({{1.0}}), 0.95), InputError);
}

TEST_CASE("p and d factor hand cases") {
  const std::vector<double> obs{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  const Band all{{-1, 0, 1, 2, 3, 4}, {1, 2, 3, 4, 5, 6}};
  const Band none{{10, 10, 10, 10, 10, 10}, {11, 11, 11, 11, 11, 11}};
  const Band half{{0, 1, 2, 9, 9, 9}, {0, 1, 2, 10, 10, 10}};
  CHECK(p_factor(obs, all) == 1.0);
  CHECK(p_factor(obs, none) == 0.0);
  CHECK(p_factor(obs, half) == 0.5);

  // Observations with sample standard deviation 2.
  const std::vector<double> spread{-2.0, 2.0, -2.0, 2.0, 0.0};
  const double sd = std::sqrt(16.0 / 4.0);
  REQUIRE(sd == 2.0);
  Band width05{std::vector<double>(5, 0.0), std::vector<double>(5, 0.5)};
  CHECK(d_factor(spread, width05) == doctest::Approx(0.25).epsilon(1e-15));
  Band zero{spread, spread};
  CHECK(d_factor(spread, zero) == 0.0);
  Band doubled{std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)};
  CHECK(d_factor(spread, doubled) == doctest::Approx(2.0 * d_factor(spread, width05)));

  CHECK_THROWS_AS(p_factor(obs, Band{{0}, {1}}), InputError);
  CHECK_THROWS_AS(d_factor(std::vector<double>(5, 1.0), width05), InputError);
}

TEST_CASE("p is non-decreasing in the band level") {
  TestRng rng(21);
  std::vector<std::vector<double>> cols(8, std::vector<double>(100));
  std::vector<double> obs(100);
  for (int j = 0; j < 100; ++j) {
    const double truth = rng.normal(0.0, 3.0);
    obs[static_cast<std::size_t>(j)] = truth + rng.normal(0.0, 0.8);
    for (auto& c : cols) c[static_cast<std::size_t>(j)] = truth + rng.normal(0.0, 0.5);
  }
  const Ensemble e = from_columns(cols);
  const BmaFit fit = bma_fit(e, obs);
  double prev = 0.0;
  for (double level : {0.5, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const double p = p_factor(obs, interval_bounds(e, fit.weights, fit.sigmas, level));
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("deterministic model at zero spread gives the exact-hit fraction and d = 0") {
  TestRng rng(22);
  const Matrix X = random_matrix(rng, 20, 2, 1.0, 2.0);
  const std::vector<TrainedModel> models{linear_model({1.0, 1.0}, 0.0)};
  const Ensemble e = mc_ensemble(models, X, 3, {1.0, 0.0}, 1);
  std::vector<double> obs = models[0].predict_all(X);
  for (std::size_t j = 0; j < obs.size(); j += 4) obs[j] += 1.0;
  const Band band = quantile_bounds(e);
  CHECK(p_factor(obs, band) == doctest::Approx(15.0 / 20.0));
  CHECK(d_factor(obs, band) == 0.0);
}

TEST_CASE("band mode names") {
  CHECK(parse_band_mode("bma") == BandMode::Bma);
  CHECK(parse_band_mode("quantile") == BandMode::Quantile);
  CHECK_THROWS_AS(parse_band_mode("mcmc"), InputError);
}
