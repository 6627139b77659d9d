#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwl/optim/algorithms.hpp"

namespace gwl {

CsoState cso_init(Harness& h, const CsoConfig& cfg, std::span<const ParamVector> initial) {
  CsoState s;
  s.positions = initial_population(h, cfg.population, initial);
  s.velocities.assign(s.positions.size(), ParamVector(h.dimension(), 0.0));
  for (ParamVector& x : s.positions) s.costs.push_back(h.evaluate(x));
  return s;
}

namespace {

void seek(Harness& h, const CsoConfig& cfg, ParamVector& cat, double& cost) {
  Rng& rng = h.rng();
  const std::size_t dim = cat.size();
  const auto changed =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(cfg.cdc * static_cast<double>(dim))), 1, dim);
  std::vector<std::size_t> dims(dim);
  ParamVector best_copy;
  double best_cost = cost;
  for (int c = 0; c < cfg.smp; ++c) {
    std::iota(dims.begin(), dims.end(), std::size_t{0});
    for (std::size_t k = 0; k < changed; ++k) std::swap(dims[k], dims[k + rng.below(dim - k)]);
    ParamVector copy = cat;
    for (std::size_t k = 0; k < changed; ++k) copy[dims[k]] *= 1.0 + (2.0 * rng.uniform() - 1.0) * cfg.srd;
    const double c_cost = h.evaluate(copy);
    if (c_cost < best_cost) {
      best_cost = c_cost;
      best_copy = std::move(copy);
    }
  }
  if (!best_copy.empty()) {
    cat = std::move(best_copy);
    cost = best_cost;
  }
}

}  // namespace

void cso_step(Harness& h, const CsoConfig& cfg, CsoState& state) {
  Rng& rng = h.rng();
  const ParamVector global = h.best();
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    ParamVector& x = state.positions[i];
    if (rng.uniform() < cfg.mr) {
      ParamVector& v = state.velocities[i];
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double vmax = cfg.v_max * h.range(d);
        v[d] = std::clamp(cfg.inertia * v[d] + rng.uniform() * cfg.c1 * (global[d] - x[d]), -vmax, vmax);
        x[d] += v[d];
      }
      state.costs[i] = h.evaluate(x);
    } else {
      seek(h, cfg, x, state.costs[i]);
    }
  }
}

}  // namespace gwl
