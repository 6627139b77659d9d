#include <algorithm>

#include "gwl/optim/algorithms.hpp"

namespace gwl {

PsoState pso_init(Harness& h, const PsoConfig& cfg, std::span<const ParamVector> initial) {
  PsoState s;
  s.positions = initial_population(h, cfg.population, initial);
  s.velocities.assign(s.positions.size(), ParamVector(h.dimension(), 0.0));
  for (ParamVector& x : s.positions) s.personal_cost.push_back(h.evaluate(x));
  s.personal_best = s.positions;
  return s;
}

void pso_step(Harness& h, const PsoConfig& cfg, PsoState& state, int iter) {
  const double frac = static_cast<double>(iter) / static_cast<double>(cfg.iterations);
  const double w = cfg.inertia - (cfg.inertia - cfg.inertia_final) * frac;
  const ParamVector global = h.best();
  Rng& rng = h.rng();
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    ParamVector& x = state.positions[i];
    ParamVector& v = state.velocities[i];
    const ParamVector& p = state.personal_best[i];
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      const double vmax = cfg.v_max * h.range(d);
      v[d] = std::clamp(w * v[d] + r1 * cfg.c1 * (p[d] - x[d]) + r2 * cfg.c2 * (global[d] - x[d]), -vmax, vmax);
      x[d] += v[d];
    }
    const double cost = h.evaluate(x);
    if (cost < state.personal_cost[i]) {
      state.personal_cost[i] = cost;
      state.personal_best[i] = x;
    }
  }
}

}  // namespace gwl
