#pragma once

// Helpers shared by the unit tests: random fixtures and independent oracles
// that recompute library results by a different route.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gwl/kv.hpp"
#include "gwl/surrogates/anfis.hpp"
#include "gwl/surrogates/mlp.hpp"
#include "gwl/taguchi.hpp"
#include "gwl/types.hpp"

namespace gwl::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(GWL_FIXTURE_DIR) / name;
}

/// Test-side random source, deliberately separate from gwl::Rng.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

 private:
  std::mt19937 engine_;
};

inline Matrix random_matrix(TestRng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  }
  return m;
}

inline Matrix random_symmetric(TestRng& rng, int n) {
  Matrix a = random_matrix(rng, n, n, -2.0, 2.0);
  return (a + a.transpose()) / 2.0;
}

/// Eigenvalues of a symmetric 3x3 matrix as the roots of its characteristic
/// cubic, found by bracketing and bisection. Descending order.
inline std::array<double, 3> cubic_eigenvalues(const Matrix& R) {
  const double c2 = R.trace();
  const double c1 = R(0, 0) * R(1, 1) - R(0, 1) * R(1, 0) + R(0, 0) * R(2, 2) - R(0, 2) * R(2, 0) +
                    R(1, 1) * R(2, 2) - R(1, 2) * R(2, 1);
  const double c0 = R(0, 0) * (R(1, 1) * R(2, 2) - R(1, 2) * R(2, 1)) -
                    R(0, 1) * (R(1, 0) * R(2, 2) - R(1, 2) * R(2, 0)) +
                    R(0, 2) * (R(1, 0) * R(2, 1) - R(1, 1) * R(2, 0));
  // p(t) = t^3 - c2 t^2 + c1 t - c0
  auto p = [&](long double t) { return ((t - c2) * t + c1) * t - c0; };
  // Critical points split the real line into three monotone pieces.
  const long double disc = std::max(0.0L, static_cast<long double>(c2) * c2 - 3.0L * c1);
  const long double s = std::sqrt(disc);
  const long double t1 = (c2 - s) / 3.0L, t2 = (c2 + s) / 3.0L;
  const long double bound = 1.0L + std::abs(c2) + std::abs(c1) + std::abs(c0);
  auto bisect = [&](long double lo, long double hi) {
    for (int i = 0; i < 200; ++i) {
      const long double mid = 0.5L * (lo + hi);
      if ((p(lo) <= 0) == (p(mid) <= 0)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return static_cast<double>(0.5L * (lo + hi));
  };
  std::array<double, 3> roots{bisect(t2, bound), bisect(t1, t2), bisect(-bound, t1)};
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

/// Standard normal CDF via erfc.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Quantile of a Gaussian mixture by bisection on its CDF.
inline double mixture_quantile(const std::vector<double>& means, const std::vector<double>& sds,
                               const std::vector<double>& weights, double q) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 0; k < means.size(); ++k) {
    lo = std::min(lo, means[k] - 40.0 * sds[k]);
    hi = std::max(hi, means[k] + 40.0 * sds[k]);
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    double cdf = 0.0;
    for (std::size_t k = 0; k < means.size(); ++k) cdf += weights[k] * normal_cdf((mid - means[k]) / sds[k]);
    (cdf < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline AnfisParams random_params(TestRng& rng, const AnfisSpec& spec) {
  AnfisParams p;
  for (int i = 0; i < spec.premise_count(); ++i) {
    p.premise.push_back({rng.uniform(0.2, 1.5), rng.uniform(0.5, 4.0), rng.uniform(-0.3, 1.3)});
  }
  p.consequent = random_matrix(rng, spec.rules(), spec.n_inputs + 1, -3.0, 3.0);
  return p;
}

// Layer-by-layer evaluation written out from the five-layer definition.
inline double layered_forward(const AnfisSpec& spec, const AnfisParams& p, const std::vector<double>& x) {
  const int n = spec.n_inputs, m = spec.mfs_per_input;
  // Layer 1: membership grades.
  std::vector<std::vector<double>> grade(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      const BellParams& b = p.premise[static_cast<std::size_t>(i * m + k)];
      const double u = (x[static_cast<std::size_t>(i)] - b.c) / b.a;
      grade[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = 1.0 / (1.0 + std::pow(u * u, b.b));
    }
  }
  // Layer 2: products over the rule's membership choices, input 0 fastest.
  const int rules = spec.rules();
  std::vector<double> w(static_cast<std::size_t>(rules), 1.0);
  for (int r = 0; r < rules; ++r) {
    int code = r;
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(r)] *= grade[static_cast<std::size_t>(i)][static_cast<std::size_t>(code % m)];
      code /= m;
    }
  }
  // Layer 3: normalization.
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  // Layers 4 and 5: weighted first-order consequents, summed.
  double out = 0.0;
  for (int r = 0; r < rules; ++r) {
    double z = p.consequent(r, n);
    for (int i = 0; i < n; ++i) z += p.consequent(r, i) * x[static_cast<std::size_t>(i)];
    out += w[static_cast<std::size_t>(r)] / total * z;
  }
  return out;
}

inline MlpSpec random_spec(TestRng& rng) {
  MlpSpec spec;
  spec.widths = {rng.integer(1, 5)};
  const int hidden_layers = rng.integer(1, 2);
  for (int l = 0; l < hidden_layers; ++l) spec.widths.push_back(rng.integer(1, 6));
  spec.widths.push_back(1);
  return spec;
}

inline MlpParams random_weights(TestRng& rng, const MlpSpec& spec) {
  MlpParams p;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    p.weights.push_back(random_matrix(rng, spec.widths[l + 1], spec.widths[l], -1.5, 1.5));
    p.biases.push_back(random_matrix(rng, spec.widths[l + 1], 1, -1.0, 1.0).col(0));
  }
  return p;
}

// Neuron-by-neuron evaluation with plain loops.
inline double neuron_forward(const MlpSpec& spec, const MlpParams& p, const std::vector<double>& x) {
  std::vector<double> act = x;
  const std::size_t layers = spec.widths.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<double> next;
    for (int j = 0; j < spec.widths[l + 1]; ++j) {
      double s = p.biases[l](j);
      for (int i = 0; i < spec.widths[l]; ++i) s += p.weights[l](j, i) * act[static_cast<std::size_t>(i)];
      next.push_back(l + 1 == layers ? s : 1.0 / (1.0 + std::exp(-s)));
    }
    act = next;
  }
  return act[0];
}

/// Balanced full-factorial costs whose per-level mean S/N reproduces the
/// fixture exactly under an additive S/N model.
struct FixturePlan {
  TrialPlan plan;
  std::vector<std::vector<double>> costs;
};

inline FixturePlan taguchi_fixture_plan() {
  const KeyValues kv = KeyValues::read(fixture("taguchi_goa.txt"));
  std::vector<FactorLevels> factors;
  std::vector<std::vector<double>> sn;
  for (const char* name : {"population", "l", "f"}) {
    const std::string key = std::string("factor.") + name;
    factors.push_back({name, kv.get_doubles(key + ".levels")});
    sn.push_back(kv.get_doubles(key + ".sn"));
  }
  FixturePlan fp;
  fp.plan = build_plan(factors, PlanMode::FullFactorial);
  double grand = 0.0;
  for (const auto& s : sn) grand += (s[0] + s[1] + s[2] + s[3]) / 4.0;
  const double mu = grand / 3.0;
  for (std::size_t t = 0; t < fp.plan.trials.size(); ++t) {
    double eta = mu;
    for (std::size_t f = 0; f < 3; ++f) {
      const auto& s = sn[f];
      eta += s[static_cast<std::size_t>(fp.plan.trials[t][f])] - (s[0] + s[1] + s[2] + s[3]) / 4.0;
    }
    fp.costs.push_back({std::pow(10.0, -eta / 20.0)});
  }
  return fp;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace gwl::test
