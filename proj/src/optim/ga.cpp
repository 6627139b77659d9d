#include <algorithm>
#include <numeric>

#include "gwl/optim/algorithms.hpp"

namespace gwl {

ParamVector ga_crossover(std::span<const double> a, std::span<const double> b, double lambda) {
  ParamVector child(a.size());
  for (std::size_t d = 0; d < a.size(); ++d) child[d] = lambda * a[d] + (1.0 - lambda) * b[d];
  return child;
}

GaState ga_init(Harness& h, const GaConfig& cfg, std::span<const ParamVector> initial) {
  GaState s;
  s.population = initial_population(h, cfg.population, initial);
  for (ParamVector& x : s.population) s.costs.push_back(h.evaluate(x));
  return s;
}

namespace {

std::size_t tournament(Rng& rng, const std::vector<double>& costs) {
  const std::size_t a = rng.below(costs.size());
  const std::size_t b = rng.below(costs.size());
  return costs[b] < costs[a] ? b : a;
}

}  // namespace

void ga_step(Harness& h, const GaConfig& cfg, GaState& state) {
  const std::size_t n = state.population.size();
  Rng& rng = h.rng();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return state.costs[a] < state.costs[b]; });

  std::vector<ParamVector> next;
  std::vector<double> next_costs;
  next.reserve(n);
  const auto elite = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.elitism, 0)), n);
  for (std::size_t e = 0; e < elite; ++e) {
    next.push_back(state.population[order[e]]);
    next_costs.push_back(state.costs[order[e]]);
  }

  while (next.size() < n) {
    const ParamVector& pa = state.population[tournament(rng, state.costs)];
    const ParamVector& pb = state.population[tournament(rng, state.costs)];
    ParamVector child1 = pa;
    ParamVector child2 = pb;
    if (rng.uniform() < cfg.crossover_rate) {
      const double lambda = rng.uniform();
      child1 = ga_crossover(pa, pb, lambda);
      child2 = ga_crossover(pb, pa, lambda);
    }
    for (ParamVector* child : {&child1, &child2}) {
      if (next.size() == n) break;
      for (std::size_t d = 0; d < child->size(); ++d) {
        if (rng.uniform() < cfg.mutation_prob) (*child)[d] += rng.normal(0.0, cfg.mutation_scale * h.range(d));
      }
      const double cost = h.evaluate(*child);
      next.push_back(std::move(*child));
      next_costs.push_back(cost);
    }
  }
  state.population = std::move(next);
  state.costs = std::move(next_costs);
}

}  // namespace gwl
