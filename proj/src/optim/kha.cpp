#include <algorithm>
#include <cmath>
#include <limits>

#include "gwl/optim/algorithms.hpp"

namespace gwl {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

// acc += scale * (to - from) / |to - from|; nothing when the points coincide.
void add_unit(ParamVector& acc, std::span<const double> from, std::span<const double> to, double scale) {
  const double norm = distance(from, to);
  if (norm == 0.0 || scale == 0.0) return;
  for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += scale * (to[d] - from[d]) / norm;
}

}  // namespace

KhaState kha_init(Harness& h, const KhaConfig& cfg, std::span<const ParamVector> initial) {
  KhaState s;
  s.positions = initial_population(h, cfg.population, initial);
  for (ParamVector& x : s.positions) s.costs.push_back(h.evaluate(x));
  s.personal_best = s.positions;
  s.personal_cost = s.costs;
  s.induced.assign(s.positions.size(), ParamVector(h.dimension(), 0.0));
  s.foraging = s.induced;
  return s;
}

ParamVector kha_diffusion(Harness& h, const KhaConfig& cfg, int iter) {
  const std::size_t dim = h.dimension();
  ParamVector dir(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& v : dir) {
      v = h.rng().normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
  }
  const double scale = cfg.d_max * (1.0 - static_cast<double>(iter) / static_cast<double>(cfg.iterations)) / norm;
  for (double& v : dir) v *= scale;
  return dir;
}

void kha_step(Harness& h, const KhaConfig& cfg, KhaState& state, int iter) {
  const std::size_t n = state.positions.size();
  const std::size_t dim = h.dimension();
  const double frac = static_cast<double>(iter) / static_cast<double>(cfg.iterations);
  Rng& rng = h.rng();

  double k_best = std::numeric_limits<double>::infinity();
  double k_worst = -std::numeric_limits<double>::infinity();
  for (double k : state.costs) {
    if (!std::isfinite(k)) continue;
    k_best = std::min(k_best, k);
    k_worst = std::max(k_worst, k);
  }
  const double spread = k_worst - k_best;
  auto finite_cost = [&](double k) { return std::isfinite(k) ? k : k_worst; };
  auto khat = [&](double ki, double kj) {
    if (!(spread > 0.0)) return 0.0;
    return (finite_cost(ki) - finite_cost(kj)) / spread;
  };

  // Food: fitness-weighted centroid with weights 1/K, shifted when K can be <= 0.
  ParamVector food(dim, 0.0);
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(state.costs[j])) continue;
    const double w = k_best > 0.0 ? 1.0 / state.costs[j] : 1.0 / (state.costs[j] - k_best + 1e-12);
    weight_sum += w;
    for (std::size_t d = 0; d < dim; ++d) food[d] += w * state.positions[j][d];
  }
  double food_cost = std::numeric_limits<double>::infinity();
  if (weight_sum > 0.0) {
    for (double& v : food) v /= weight_sum;
    food_cost = h.evaluate(food);
  }

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist[i * n + j] = dist[j * n + i] = distance(state.positions[i], state.positions[j]);
  }

  const ParamVector best = h.best();
  const double best_cost = h.best_cost();
  const double c_food = 2.0 * (1.0 - frac);
  const double dt = cfg.ct * [&] {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += h.range(d);
    return s;
  }();

  std::vector<ParamVector> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ParamVector& x = state.positions[i];
    const double ki = state.costs[i];

    double sensing = 0.0;
    for (std::size_t j = 0; j < n; ++j) sensing += dist[i * n + j];
    sensing /= 5.0 * static_cast<double>(n);

    ParamVector alpha(dim, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && dist[i * n + j] < sensing) add_unit(alpha, x, state.positions[j], khat(ki, state.costs[j]));
    }
    const double c_best = 2.0 * (rng.uniform() + frac);
    add_unit(alpha, x, best, c_best * khat(ki, best_cost));

    ParamVector beta(dim, 0.0);
    if (weight_sum > 0.0) add_unit(beta, x, food, c_food * khat(ki, food_cost));
    add_unit(beta, x, state.personal_best[i], khat(ki, state.personal_cost[i]));

    const ParamVector diffusion = kha_diffusion(h, cfg, iter);
    ParamVector& N = state.induced[i];
    ParamVector& F = state.foraging[i];
    next[i] = x;
    for (std::size_t d = 0; d < dim; ++d) {
      N[d] = cfg.n_max * alpha[d] + cfg.inertia_n * N[d];
      F[d] = cfg.v_f * beta[d] + cfg.inertia_f * F[d];
      next[i][d] += dt * (N[d] + F[d] + diffusion[d]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    state.positions[i] = std::move(next[i]);
    state.costs[i] = h.evaluate(state.positions[i]);
    if (state.costs[i] < state.personal_cost[i]) {
      state.personal_cost[i] = state.costs[i];
      state.personal_best[i] = state.positions[i];
    }
  }
}

}  // namespace gwl
