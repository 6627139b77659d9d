#include <doctest.h>

#include <numeric>

#include "gwl/error.hpp"
#include "gwl/surrogates/svr.hpp"
#include "support.hpp"

using namespace gwl;
using namespace gwl::test;

TEST_CASE("kernel hand values") {
  const std::vector<double> a{0.3, -1.0}, b{1.3, -1.0};
  CHECK(rbf_kernel(a, a, 0.7) == 1.0);
  // |a - b|^2 = 1 = 2 gamma^2
  CHECK(rbf_kernel(a, b, std::sqrt(0.5)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  double previous = 1.0;
  for (double d = 0.1; d < 5.0; d += 0.1) {
    const double k = rbf_kernel(std::vector<double>{0.0}, std::vector<double>{d}, 1.0);
    REQUIRE(k < previous);
    previous = k;
  }
}

TEST_CASE("zero coefficients predict the bias") {
  SvrModel m;
  m.bias = 3.0;
  m.support_vectors = Matrix(0, 2);
  CHECK(svr_predict(m, std::vector<double>{1.0, 2.0}) == 3.0);
}

TEST_CASE("KKT conditions and dual constraints on random problems") {
  TestRng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(10, 60), d = rng.integer(1, 4);
    const Matrix X = random_matrix(rng, n, d, 0.0, 1.0);
    Vector y(n);
    for (int r = 0; r < n; ++r) y(r) = std::sin(3 * X(r, 0)) + 0.1 * rng.normal();
    const SvrHyper h{rng.uniform(0.1, 50.0), rng.uniform(0.1, 2.0), rng.uniform(0.0, 0.2)};
    const SvrModel m = svr_fit(X, y, h);
    REQUIRE(m.converged);
    CHECK(svr_max_kkt_violation(m, X, y) < 1e-3);
    CHECK(std::abs(std::accumulate(m.coefficients.begin(), m.coefficients.end(), 0.0)) <= 1e-6);
    for (double c : m.coefficients) REQUIRE(std::abs(c) <= h.C + 1e-12);

    // A free support vector sits on the tube edge.
    for (std::size_t s = 0; s < m.coefficients.size(); ++s) {
      const double c = std::abs(m.coefficients[s]);
      if (c > 1e-8 && c < h.C - 1e-8) {
        const auto r = static_cast<Eigen::Index>(m.support_index[s]);
        REQUIRE(std::abs(svr_predict(m, row_span(X, r)) - y(r)) <= h.epsilon + 1e-3);
      }
    }
  }
}

TEST_CASE("noiseless line stays inside the tube") {
  Matrix X(21, 1);
  Vector y(21);
  for (int i = 0; i < 21; ++i) {
    X(i, 0) = i / 20.0;
    y(i) = 2.0 * X(i, 0);
  }
  const SvrModel m = svr_fit(X, y, {100.0, 1.0, 0.1});
  for (int i = 0; i < 21; ++i) CHECK(std::abs(svr_predict(m, row_span(X, i)) - y(i)) <= 0.1 + 1e-3);
}

TEST_CASE("constant targets need no support vectors") {
  TestRng rng(2);
  const Matrix X = random_matrix(rng, 30, 2);
  const Vector y = Vector::Constant(30, 4.2);
  const SvrModel m = svr_fit(X, y, {10.0, 0.5, 0.05});
  for (double c : m.coefficients) CHECK(c == 0.0);
  CHECK(svr_predict(m, std::vector<double>{0.1, -0.7}) == doctest::Approx(4.2).epsilon(1e-12));
}

TEST_CASE("prediction is continuous") {
  TestRng rng(6);
  const Matrix X = random_matrix(rng, 40, 2);
  Vector y(40);
  for (int r = 0; r < 40; ++r) y(r) = X(r, 0) * X(r, 1) + rng.normal(0, 0.1);
  const SvrModel m = svr_fit(X, y, {5.0, 0.5, 0.05});
  const std::vector<double> x{0.2, -0.3};
  double previous = 1e300;
  for (double delta = 1e-1; delta > 1e-9; delta /= 10) {
    const double gap = std::abs(svr_predict(m, x) - svr_predict(m, std::vector<double>{0.2 + delta, -0.3}));
    REQUIRE(gap <= previous + 1e-15);
    previous = gap;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("folds partition the rows") {
  const auto folds = make_folds(23, 5, 4);
  REQUIRE(folds.size() == 5);
  std::vector<int> seen(23, 0);
  for (const auto& f : folds) {
    CHECK((f.size() == 4 || f.size() == 5));
    for (std::size_t i : f) ++seen[i];
  }
  for (int s : seen) CHECK(s == 1);
  CHECK(make_folds(23, 5, 4) == folds);
}

TEST_CASE("grid search tie and single-cell rules") {
  TestRng rng(9);
  const Matrix X = random_matrix(rng, 25, 2);
  Vector y(25);
  for (int r = 0; r < 25; ++r) y(r) = X(r, 0) + rng.normal(0, 0.1);
  const std::vector<double> one_c{3.0}, one_g{0.4};
  const GridSearchResult single = svr_grid_search(X, y, one_c, one_g, 0.05, 5, 1);
  CHECK(single.best.C == 3.0);
  CHECK(single.best.gamma == 0.4);
  CHECK(single.cv_rmse.rows() == 1);

  // Constant targets give every cell the same error; the smallest C wins.
  const std::vector<double> cs{10.0, 1.0, 5.0}, gs{2.0, 0.5};
  const GridSearchResult tie = svr_grid_search(X, Vector::Constant(25, 1.0), cs, gs, 0.05, 5, 1);
  CHECK(tie.best.C == 1.0);
  CHECK(tie.best.gamma == 0.5);
}

TEST_CASE("invalid hyperparameters") {
  CHECK_THROWS_AS((SvrHyper{0.0, 1.0, 0.1}.validate()), InputError);
  CHECK_THROWS_AS((SvrHyper{1.0, -1.0, 0.1}.validate()), InputError);
  CHECK_THROWS_AS((SvrHyper{1.0, 1.0, -0.1}.validate()), InputError);
}
