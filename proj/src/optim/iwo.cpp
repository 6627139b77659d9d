#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwl/optim/algorithms.hpp"

namespace gwl {

int iwo_seed_count(const WaConfig& cfg, double cost, double best, double worst) {
  if (!(worst > best) || !std::isfinite(cost)) return cfg.s_min;
  if (!std::isfinite(worst)) return cost == best ? cfg.s_max : cfg.s_min;
  const double t = (worst - cost) / (worst - best);
  return cfg.s_min + static_cast<int>(std::lround(t * (cfg.s_max - cfg.s_min)));
}

double iwo_sigma(const WaConfig& cfg, int iter) {
  const double frac = static_cast<double>(cfg.iterations - iter) / static_cast<double>(cfg.iterations);
  return std::pow(frac, cfg.modulation) * (cfg.sigma_init - cfg.sigma_final) + cfg.sigma_final;
}

WaState iwo_init(Harness& h, const WaConfig& cfg, std::span<const ParamVector> initial) {
  WaState s;
  s.weeds = initial_population(h, cfg.initial_population, initial);
  for (ParamVector& x : s.weeds) s.costs.push_back(h.evaluate(x));
  return s;
}

void iwo_step(Harness& h, const WaConfig& cfg, WaState& state, int iter) {
  const auto [lo, hi] = std::minmax_element(state.costs.begin(), state.costs.end());
  const double best = *lo, worst = *hi;
  const double sigma = iwo_sigma(cfg, iter);
  Rng& rng = h.rng();

  std::vector<ParamVector> colony = state.weeds;
  std::vector<double> costs = state.costs;
  for (std::size_t i = 0; i < state.weeds.size(); ++i) {
    const int seeds = iwo_seed_count(cfg, state.costs[i], best, worst);
    for (int s = 0; s < seeds; ++s) {
      ParamVector seed = state.weeds[i];
      for (std::size_t d = 0; d < seed.size(); ++d) seed[d] += rng.normal(0.0, sigma * h.range(d));
      costs.push_back(h.evaluate(seed));
      colony.push_back(std::move(seed));
    }
  }

  std::vector<std::size_t> order(colony.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  const std::size_t keep = std::min(order.size(), static_cast<std::size_t>(cfg.p_max));
  state.weeds.clear();
  state.costs.clear();
  for (std::size_t k = 0; k < keep; ++k) {
    state.weeds.push_back(std::move(colony[order[k]]));
    state.costs.push_back(costs[order[k]]);
  }
}

}  // namespace gwl
