#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gwl/random.hpp"
#include "gwl/surrogates/layout.hpp"

namespace gwl {

/// Bounded cost function; lower is better.
struct Objective {
  std::string name;
  Bounds bounds;
  std::function<double(std::span<const double>)> evaluate;

  int dimension() const { return static_cast<int>(bounds.size()); }
};

struct RunResult {
  std::string algorithm;
  ParamVector best;
  double best_cost = 0.0;
  std::vector<double> trace;  // entry 0 = initial population, then one per iteration
  long evaluations = 0;
  std::uint64_t seed = 0;
};

/// Shared bookkeeping for every optimizer: clamps candidates into the box,
/// maps non-finite costs to +inf, counts evaluations and tracks the
/// best-so-far point.
class Harness {
 public:
  Harness(const Objective& objective, std::uint64_t seed);

  const Objective& objective() const { return objective_; }
  const Bounds& bounds() const { return objective_.bounds; }
  std::size_t dimension() const { return objective_.bounds.size(); }
  Rng& rng() { return rng_; }

  /// Clamps x in place and returns its cost.
  double evaluate(ParamVector& x);

  ParamVector random_point();
  double range(std::size_t d) const { return bounds().upper[d] - bounds().lower[d]; }

  /// Appends the current best cost to the trace.
  void record();

  const ParamVector& best() const { return best_; }
  double best_cost() const { return best_cost_; }
  long evaluations() const { return evaluations_; }

  RunResult finish(std::string algorithm) const;

 private:
  const Objective& objective_;
  std::uint64_t seed_;
  Rng rng_;
  ParamVector best_;
  double best_cost_;
  long evaluations_ = 0;
  std::vector<double> trace_;
};

/// Population of size n: the supplied initial points first (clamped),
/// then uniform random points.
std::vector<ParamVector> initial_population(Harness& h, int n, std::span<const ParamVector> initial);

/// "sphere" (sum x^2) or "rastrigin", both on [-5.12, 5.12]^dimension.
Objective benchmark_objective(const std::string& name, int dimension);

}  // namespace gwl
