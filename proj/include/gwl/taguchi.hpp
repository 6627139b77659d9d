#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gwl {

struct FactorLevels {
  std::string name;
  std::vector<double> values;  // ordered, distinct, at least two
};

enum class PlanMode { FullFactorial, OneAtATime };

PlanMode parse_plan_mode(const std::string& name);

struct TrialPlan {
  std::vector<FactorLevels> factors;
  std::vector<std::vector<int>> trials;  // level index per factor

  /// Factor values of one trial.
  std::vector<double> values(std::size_t trial) const;
};

/// Smaller-the-better signal-to-noise ratio, -10 log10(mean(Y^2)), in dB.
double sn_ratio_smaller_better(std::span<const double> costs);

/// Full factorial enumerates the cross product with the first factor
/// varying slowest. One-at-a-time sweeps the first factor over all its
/// levels with the others at level 1, then moves each remaining factor over
/// levels 2..L with everything else at level 1.
TrialPlan build_plan(const std::vector<FactorLevels>& factors, PlanMode mode);

struct SnTable {
  std::vector<FactorLevels> factors;
  std::vector<std::vector<double>> mean_sn;  // [factor][level]
  std::vector<int> best;                     // chosen level index per factor

  double best_value(std::size_t factor) const { return factors[factor].values[static_cast<std::size_t>(best[factor])]; }
};

/// Per factor, picks the level with the highest mean S/N over the trials
/// that use it; ties go to the lower level index.
SnTable best_levels(const TrialPlan& plan, const std::vector<std::vector<double>>& trial_costs, int repeats);

/// Runs every trial `repeats` times; run(values, repeat) returns one cost.
std::vector<std::vector<double>> run_plan(const TrialPlan& plan, int repeats,
                                          const std::function<double(const std::vector<double>&, int)>& run);

/// Level grids used by the tune command for each optimizer.
std::vector<FactorLevels> default_levels(const std::string& algorithm);

}  // namespace gwl
