#include <cmath>
#include <limits>

#include "gwl/error.hpp"
#include "gwl/optim/objective.hpp"

namespace gwl {

Harness::Harness(const Objective& objective, std::uint64_t seed)
    : objective_(objective), seed_(seed), rng_(seed), best_cost_(std::numeric_limits<double>::infinity()) {
  objective_.bounds.validate();
  if (!objective_.evaluate) throw InputError("objective '" + objective_.name + "' has no evaluate function");
}

double Harness::evaluate(ParamVector& x) {
  if (x.size() != dimension()) {
    throw InputError("candidate has " + std::to_string(x.size()) + " coordinates, objective expects " +
                     std::to_string(dimension()));
  }
  bounds().clamp(x);
  double cost = objective_.evaluate(x);
  if (!std::isfinite(cost)) cost = std::numeric_limits<double>::infinity();
  ++evaluations_;
  if (cost < best_cost_ || best_.empty()) {
    best_cost_ = cost;
    best_ = x;
  }
  return cost;
}

ParamVector Harness::random_point() {
  ParamVector x(dimension());
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = rng_.uniform(bounds().lower[d], bounds().upper[d]);
  return x;
}

void Harness::record() { trace_.push_back(best_cost_); }

RunResult Harness::finish(std::string algorithm) const {
  RunResult r;
  r.algorithm = std::move(algorithm);
  r.best = best_;
  r.best_cost = best_cost_;
  r.trace = trace_;
  r.evaluations = evaluations_;
  r.seed = seed_;
  return r;
}

std::vector<ParamVector> initial_population(Harness& h, int n, std::span<const ParamVector> initial) {
  std::vector<ParamVector> pop;
  pop.reserve(static_cast<std::size_t>(n));
  for (const ParamVector& p : initial) {
    if (static_cast<int>(pop.size()) == n) break;
    ParamVector x = p;
    if (x.size() != h.dimension()) throw InputError("initial point has the wrong dimension");
    h.bounds().clamp(x);
    pop.push_back(std::move(x));
  }
  while (static_cast<int>(pop.size()) < n) pop.push_back(h.random_point());
  return pop;
}

}  // namespace gwl
