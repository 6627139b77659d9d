#include <doctest.h>

#include <numeric>

#include "gwl/error.hpp"
#include "gwl/surrogates/anfis.hpp"
#include "support.hpp"

using namespace gwl;
using namespace gwl::test;

TEST_CASE("bell membership hand values") {
  CHECK(bell_mf(0.3, {0.7, 3.0, 0.3}) == 1.0);
  CHECK(bell_mf(1.0 + 0.4, {0.4, 1.7, 1.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bell_mf(2.0, {1.0, 1.0, 0.0}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(bell_mf(1.0, {0.0, 1.0, 0.0}), InputError);
}

TEST_CASE("forward pass equals the layered evaluation") {
  TestRng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    AnfisSpec spec{rng.integer(1, 4), rng.integer(1, 3)};
    const AnfisParams p = random_params(rng, spec);
    std::vector<double> x(static_cast<std::size_t>(spec.n_inputs));
    for (double& v : x) v = rng.uniform(0.0, 1.0);
    const double expected = layered_forward(spec, p, x);
    REQUIRE(std::abs(anfis_forward(spec, p, x) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("single rule returns its consequent") {
  AnfisSpec spec{2, 1};
  AnfisParams p;
  p.premise = {{0.5, 2.0, 0.1}, {0.3, 1.0, 0.9}};
  p.consequent = Matrix(1, 3);
  p.consequent << 1.5, -2.0, 0.25;
  const std::vector<double> x{0.4, 0.7};
  CHECK(normalized_strengths(spec, p, x) == std::vector<double>{1.0});
  CHECK(anfis_forward(spec, p, x) == 1.5 * 0.4 - 2.0 * 0.7 + 0.25);
}

TEST_CASE("identical premises average the consequents") {
  AnfisSpec spec{1, 2};
  AnfisParams p;
  p.premise = {{0.5, 2.0, 0.5}, {0.5, 2.0, 0.5}};
  p.consequent = Matrix(2, 2);
  p.consequent << 2.0, 1.0, -1.0, 3.0;
  const std::vector<double> x{0.8};
  CHECK(anfis_forward(spec, p, x) == doctest::Approx(0.5 * ((2.0 * 0.8 + 1.0) + (-0.8 + 3.0))).epsilon(1e-15));
}

TEST_CASE("normalized strengths sum to one and the output is a convex combination") {
  TestRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    AnfisSpec spec{rng.integer(1, 5), rng.integer(1, 3)};
    const AnfisParams p = random_params(rng, spec);
    std::vector<double> x(static_cast<std::size_t>(spec.n_inputs));
    for (double& v : x) v = rng.uniform(-0.5, 1.5);
    const std::vector<double> wbar = normalized_strengths(spec, p, x);
    REQUIRE(std::accumulate(wbar.begin(), wbar.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    double lo = 1e300, hi = -1e300;
    for (int r = 0; r < spec.rules(); ++r) {
      double z = p.consequent(r, spec.n_inputs);
      for (int i = 0; i < spec.n_inputs; ++i) z += p.consequent(r, i) * x[static_cast<std::size_t>(i)];
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    const double out = anfis_forward(spec, p, x);
    REQUIRE(out >= lo - 1e-9);
    REQUIRE(out <= hi + 1e-9);
  }
}

TEST_CASE("no firing rule is a numeric error") {
  AnfisSpec spec{1, 1};
  AnfisParams p;
  p.premise = {{1e-3, 50.0, 0.0}};
  p.consequent = Matrix::Ones(1, 2);
  CHECK_THROWS_AS(anfis_forward(spec, p, std::vector<double>{1e6}), NumericError);
}

TEST_CASE("premise gradient matches finite differences") {
  TestRng rng(23);
  AnfisSpec spec{2, 2};
  const Matrix X = random_matrix(rng, 30, 2, 0.0, 1.0);
  const Vector y = random_matrix(rng, 30, 1, 0.0, 1.0).col(0);
  const AnfisParams p = random_params(rng, spec);
  const std::vector<BellParams> g = anfis_premise_gradient(spec, p, X, y);
  const double h = 1e-6;
  for (std::size_t i = 0; i < p.premise.size(); ++i) {
    for (double BellParams::*field : {&BellParams::a, &BellParams::b, &BellParams::c}) {
      AnfisParams up = p, down = p;
      up.premise[i].*field += h;
      down.premise[i].*field -= h;
      const double fd = (anfis_mse(spec, up, X, y) - anfis_mse(spec, down, X, y)) / (2 * h);
      CHECK(g[i].*field == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
    }
  }
}

TEST_CASE("zero epochs is one least-squares solve on the initial premises") {
  TestRng rng(8);
  AnfisSpec spec{2, 2};
  const Matrix X = random_matrix(rng, 40, 2, 0.0, 1.0);
  const Vector y = random_matrix(rng, 40, 1, 0.0, 1.0).col(0);
  const AnfisTrainResult r = anfis_classical_train(spec, X, y, 0, 0.01);
  const AnfisParams init = anfis_initial_params(spec);
  for (std::size_t i = 0; i < init.premise.size(); ++i) {
    CHECK(r.params.premise[i].a == init.premise[i].a);
    CHECK(r.params.premise[i].b == init.premise[i].b);
    CHECK(r.params.premise[i].c == init.premise[i].c);
  }
  CHECK(r.params.consequent == anfis_solve_consequents(spec, init, X, y));
  CHECK(r.mse_trace.size() == 1);
}

TEST_CASE("classical training fits a single-rule generator and never worsens") {
  TestRng rng(31);
  AnfisSpec spec{2, 1};
  const Matrix X = random_matrix(rng, 50, 2, 0.0, 1.0);
  Vector y(50);
  for (int r = 0; r < 50; ++r) y(r) = 0.7 * X(r, 0) - 0.2 * X(r, 1) + 0.1;
  const AnfisTrainResult fit = anfis_classical_train(spec, X, y, 50, 0.01);
  CHECK(anfis_mse(spec, fit.params, X, y) < 1e-6);

  AnfisSpec wide{2, 3};
  Vector wavy(50);
  for (int r = 0; r < 50; ++r) wavy(r) = std::sin(6 * X(r, 0)) * X(r, 1);
  const AnfisTrainResult w = anfis_classical_train(wide, X, wavy, 20, 0.05);
  CHECK(anfis_mse(wide, w.params, X, wavy) <= w.mse_trace.front());
  CHECK(anfis_mse(wide, w.params, X, wavy) == *std::min_element(w.mse_trace.begin(), w.mse_trace.end()));
}
