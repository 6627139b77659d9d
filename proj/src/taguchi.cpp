#include "gwl/taguchi.hpp"

#include <cmath>
#include <set>

#include "gwl/error.hpp"

namespace gwl {

PlanMode parse_plan_mode(const std::string& name) {
  if (name == "full_factorial" || name == "full") return PlanMode::FullFactorial;
  if (name == "one_at_a_time" || name == "oat") return PlanMode::OneAtATime;
  throw InputError("unknown Taguchi plan mode '" + name + "' (expected full_factorial or one_at_a_time)");
}

std::vector<double> TrialPlan::values(std::size_t trial) const {
  std::vector<double> v;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    v.push_back(factors[f].values[static_cast<std::size_t>(trials[trial][f])]);
  }
  return v;
}

double sn_ratio_smaller_better(std::span<const double> costs) {
  if (costs.empty()) throw InputError("S/N ratio of an empty cost list");
  double ms = 0.0;
  for (double y : costs) {
    if (!(y > 0.0) || !std::isfinite(y)) throw InputError("S/N ratio needs finite positive costs");
    ms += y * y;
  }
  return -10.0 * std::log10(ms / static_cast<double>(costs.size()));
}

namespace {

void check_factors(const std::vector<FactorLevels>& factors) {
  if (factors.empty()) throw InputError("Taguchi plan needs at least one factor");
  for (const FactorLevels& f : factors) {
    if (f.values.size() < 2) throw InputError("factor '" + f.name + "' needs at least two levels");
    if (std::set<double>(f.values.begin(), f.values.end()).size() != f.values.size()) {
      throw InputError("factor '" + f.name + "' has repeated levels");
    }
  }
}

}  // namespace

TrialPlan build_plan(const std::vector<FactorLevels>& factors, PlanMode mode) {
  check_factors(factors);
  TrialPlan plan;
  plan.factors = factors;
  const std::size_t nf = factors.size();
  if (mode == PlanMode::FullFactorial) {
    std::vector<int> idx(nf, 0);
    while (true) {
      plan.trials.push_back(idx);
      std::size_t f = nf;
      while (f > 0) {
        --f;
        if (++idx[f] < static_cast<int>(factors[f].values.size())) break;
        idx[f] = 0;
        if (f == 0) return plan;
      }
    }
  }
  for (std::size_t l = 0; l < factors[0].values.size(); ++l) {
    std::vector<int> t(nf, 0);
    t[0] = static_cast<int>(l);
    plan.trials.push_back(t);
  }
  for (std::size_t f = 1; f < nf; ++f) {
    for (std::size_t l = 1; l < factors[f].values.size(); ++l) {
      std::vector<int> t(nf, 0);
      t[f] = static_cast<int>(l);
      plan.trials.push_back(t);
    }
  }
  return plan;
}

SnTable best_levels(const TrialPlan& plan, const std::vector<std::vector<double>>& trial_costs, int repeats) {
  if (trial_costs.size() != plan.trials.size()) {
    throw InputError("best_levels: " + std::to_string(trial_costs.size()) + " cost lists for " +
                     std::to_string(plan.trials.size()) + " trials");
  }
  std::vector<double> sn;
  for (std::size_t t = 0; t < trial_costs.size(); ++t) {
    if (static_cast<int>(trial_costs[t].size()) != repeats) {
      throw InputError("best_levels: trial " + std::to_string(t) + " has " + std::to_string(trial_costs[t].size()) +
                       " costs, expected " + std::to_string(repeats));
    }
    sn.push_back(sn_ratio_smaller_better(trial_costs[t]));
  }

  SnTable table;
  table.factors = plan.factors;
  for (std::size_t f = 0; f < plan.factors.size(); ++f) {
    const std::size_t levels = plan.factors[f].values.size();
    std::vector<double> sum(levels, 0.0);
    std::vector<int> count(levels, 0);
    for (std::size_t t = 0; t < plan.trials.size(); ++t) {
      const auto l = static_cast<std::size_t>(plan.trials[t][f]);
      sum[l] += sn[t];
      ++count[l];
    }
    std::vector<double> mean(levels);
    int best = -1;
    for (std::size_t l = 0; l < levels; ++l) {
      if (count[l] == 0) throw InputError("factor '" + plan.factors[f].name + "' level " + std::to_string(l + 1) + " is never tried");
      mean[l] = sum[l] / count[l];
      if (best < 0 || mean[l] > mean[static_cast<std::size_t>(best)]) best = static_cast<int>(l);
    }
    table.mean_sn.push_back(std::move(mean));
    table.best.push_back(best);
  }
  return table;
}

std::vector<std::vector<double>> run_plan(const TrialPlan& plan, int repeats,
                                          const std::function<double(const std::vector<double>&, int)>& run) {
  if (repeats < 1) throw InputError("Taguchi repeats must be >= 1");
  std::vector<std::vector<double>> costs(plan.trials.size());
  for (std::size_t t = 0; t < plan.trials.size(); ++t) {
    const std::vector<double> values = plan.values(t);
    for (int r = 0; r < repeats; ++r) costs[t].push_back(run(values, r));
  }
  return costs;
}

std::vector<FactorLevels> default_levels(const std::string& algorithm) {
  const FactorLevels population{"population", {100, 200, 300, 400}};
  if (algorithm == "goa") return {population, {"l", {0.5, 1.0, 1.5, 2.0}}, {"f", {0.1, 0.3, 0.5, 0.7}}};
  if (algorithm == "pso") {
    return {population, {"c1", {1.6, 1.8, 2.0, 2.2}}, {"c2", {1.6, 1.8, 2.0, 2.2}}, {"inertia", {0.3, 0.5, 0.7, 0.9}}};
  }
  if (algorithm == "ga") {
    return {population, {"mutation_prob", {0.01, 0.03, 0.05, 0.07}}, {"crossover_rate", {0.6, 0.7, 0.8, 0.9}}};
  }
  if (algorithm == "wa" || algorithm == "iwo") return {{"p_max", {50, 100, 150, 200}}, {"modulation", {1, 2, 3, 4}}};
  if (algorithm == "cso") return {population, {"smp", {5, 10, 15, 20}}, {"mr", {0.1, 0.3, 0.5, 0.7}}};
  if (algorithm == "kha" || algorithm == "ka") {
    return {population, {"v_f", {0.005, 0.010, 0.015, 0.020}}, {"n_max", {0.02, 0.04, 0.06, 0.08}}};
  }
  throw InputError("no Taguchi levels for optimizer '" + algorithm + "'");
}

}  // namespace gwl
