#include <cmath>
#include <numbers>

#include "gwl/error.hpp"
#include "gwl/optim/objective.hpp"

namespace gwl {

Objective benchmark_objective(const std::string& name, int dimension) {
  if (dimension < 1) throw InputError("benchmark dimension must be >= 1");
  Objective obj;
  obj.name = name;
  obj.bounds.lower.assign(static_cast<std::size_t>(dimension), -5.12);
  obj.bounds.upper.assign(static_cast<std::size_t>(dimension), 5.12);
  if (name == "sphere") {
    obj.evaluate = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s;
    };
  } else if (name == "rastrigin") {
    obj.evaluate = [](std::span<const double> x) {
      double s = 10.0 * static_cast<double>(x.size());
      for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
      return s;
    };
  } else {
    throw InputError("unknown benchmark '" + name + "' (expected sphere or rastrigin)");
  }
  return obj;
}

}  // namespace gwl
