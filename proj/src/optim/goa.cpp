#include <cmath>
#include <limits>

#include "gwl/optim/algorithms.hpp"

namespace gwl {

double goa_social_force(double r, double f, double l) { return f * std::exp(-r / l) - std::exp(-r); }

double goa_coefficient(const GoaConfig& cfg, int iter) {
  return cfg.c_max - static_cast<double>(iter) * (cfg.c_max - cfg.c_min) / static_cast<double>(cfg.iterations);
}

GoaState goa_init(Harness& h, const GoaConfig& cfg, std::span<const ParamVector> initial) {
  GoaState s;
  s.positions = initial_population(h, cfg.population, initial);
  for (ParamVector& x : s.positions) s.costs.push_back(h.evaluate(x));
  return s;
}

void goa_step(Harness& h, const GoaConfig& cfg, GoaState& state, int iter) {
  const std::size_t n = state.positions.size();
  const std::size_t dim = h.dimension();
  const double c = goa_coefficient(cfg, iter);

  std::vector<double> dist(n * n, 0.0);
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = state.positions[j][k] - state.positions[i][k];
        s += diff * diff;
      }
      const double d = std::sqrt(s);
      dist[i * n + j] = dist[j * n + i] = d;
      if (d > 0.0) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    }
  }
  // Map distances onto [1, 4]; a population with a single distinct
  // distance sits at the middle of the interval.
  auto normalized = [&](double d) { return dmax > dmin ? 1.0 + 3.0 * (d - dmin) / (dmax - dmin) : 2.5; };

  std::vector<double> half_range(dim);
  for (std::size_t k = 0; k < dim; ++k) half_range[k] = h.range(k) / 2.0;

  const ParamVector target = h.best();
  std::vector<ParamVector> next(n, ParamVector(dim, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    ParamVector& social = next[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist[i * n + j];
      if (j == i || d == 0.0) continue;
      const double s = goa_social_force(normalized(d), cfg.f, cfg.l);
      for (std::size_t k = 0; k < dim; ++k) {
        social[k] += c * half_range[k] * s * (state.positions[j][k] - state.positions[i][k]) / d;
      }
    }
    for (std::size_t k = 0; k < dim; ++k) social[k] = c * social[k] + target[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    state.positions[i] = std::move(next[i]);
    state.costs[i] = h.evaluate(state.positions[i]);
  }
}

}  // namespace gwl
