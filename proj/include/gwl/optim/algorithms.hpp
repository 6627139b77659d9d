#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gwl/optim/objective.hpp"

namespace gwl {

// Defaults follow the highest S/N level of each factor in the tuning tables.

struct GoaConfig {
  int population = 300;
  int iterations = 200;
  double l = 1.5;
  double f = 0.5;
  double c_max = 1.0;
  double c_min = 1e-5;
  // Gravity and wind constants; the position update does not use them.
  double g = 9.8;
  double u = 0.0;
};

struct PsoConfig {
  int population = 200;
  int iterations = 200;
  double c1 = 1.8;
  double c2 = 1.8;
  double inertia = 0.9;
  double inertia_final = 0.4;  // inertia decays linearly to this value
  double v_max = 0.2;          // fraction of each coordinate range
};

struct GaConfig {
  int population = 300;
  int iterations = 200;
  double mutation_prob = 0.05;
  double crossover_rate = 0.8;
  int elitism = 1;
  double mutation_scale = 0.1;  // Gaussian sigma as a fraction of the range
};

struct WaConfig {
  int initial_population = 10;
  int p_max = 100;
  int iterations = 200;
  double modulation = 4.0;
  int s_min = 0;
  int s_max = 5;
  double sigma_init = 0.5;     // fraction of each coordinate range
  double sigma_final = 1e-4;
};

struct CsoConfig {
  int population = 200;
  int iterations = 200;
  int smp = 20;
  double srd = 0.2;
  double cdc = 0.8;
  double mr = 0.7;   // probability that a cat traces
  double c1 = 1.5;
  double inertia = 0.7;
  double v_max = 0.2;  // fraction of each coordinate range
};

struct KhaConfig {
  int population = 400;
  int iterations = 200;
  double v_f = 0.015;
  double n_max = 0.08;
  double d_max = 0.005;
  double inertia_n = 0.5;
  double inertia_f = 0.5;
  double ct = 0.5;  // dt = ct * sum of coordinate ranges
};

using AlgorithmConfig = std::variant<GoaConfig, PsoConfig, GaConfig, WaConfig, CsoConfig, KhaConfig>;

/// Names: goa, pso, ga, wa (alias iwo), cso, kha.
AlgorithmConfig default_config(const std::string& algorithm);
std::string algorithm_name(const AlgorithmConfig& config);
int config_iterations(const AlgorithmConfig& config);
void set_iterations(AlgorithmConfig& config, int iterations);
void validate_config(const AlgorithmConfig& config);

/// Named numeric fields of the active config, in declaration order.
std::vector<std::pair<std::string, double>> config_parameters(const AlgorithmConfig& config);
/// Sets one named field; integer fields are rounded. Unknown names throw.
void set_parameter(AlgorithmConfig& config, const std::string& name, double value);

/// Runs the configured optimizer. Optional initial points replace the first
/// random agents.
RunResult minimize(const Objective& objective, const AlgorithmConfig& config, std::uint64_t seed,
                   std::span<const ParamVector> initial = {});

// Per-algorithm state and single-step updates. Each step evaluates the new
// candidates through the harness.

/// f * exp(-r / l) - exp(-r).
double goa_social_force(double r, double f, double l);
double goa_coefficient(const GoaConfig& cfg, int iter);

struct GoaState {
  std::vector<ParamVector> positions;
  std::vector<double> costs;
};
GoaState goa_init(Harness& h, const GoaConfig& cfg, std::span<const ParamVector> initial = {});
void goa_step(Harness& h, const GoaConfig& cfg, GoaState& state, int iter);

struct PsoState {
  std::vector<ParamVector> positions;
  std::vector<ParamVector> velocities;
  std::vector<ParamVector> personal_best;
  std::vector<double> personal_cost;
};
PsoState pso_init(Harness& h, const PsoConfig& cfg, std::span<const ParamVector> initial = {});
void pso_step(Harness& h, const PsoConfig& cfg, PsoState& state, int iter);

struct GaState {
  std::vector<ParamVector> population;
  std::vector<double> costs;
};
GaState ga_init(Harness& h, const GaConfig& cfg, std::span<const ParamVector> initial = {});
void ga_step(Harness& h, const GaConfig& cfg, GaState& state);
/// Arithmetic blend lambda * a + (1 - lambda) * b.
ParamVector ga_crossover(std::span<const double> a, std::span<const double> b, double lambda);

struct WaState {
  std::vector<ParamVector> weeds;
  std::vector<double> costs;
};
WaState iwo_init(Harness& h, const WaConfig& cfg, std::span<const ParamVector> initial = {});
void iwo_step(Harness& h, const WaConfig& cfg, WaState& state, int iter);
/// Seeds for a weed of the given cost; equal best and worst give s_min.
int iwo_seed_count(const WaConfig& cfg, double cost, double best, double worst);
/// Fraction of the range used as the seed spread at this iteration.
double iwo_sigma(const WaConfig& cfg, int iter);

struct CsoState {
  std::vector<ParamVector> positions;
  std::vector<ParamVector> velocities;
  std::vector<double> costs;
};
CsoState cso_init(Harness& h, const CsoConfig& cfg, std::span<const ParamVector> initial = {});
void cso_step(Harness& h, const CsoConfig& cfg, CsoState& state);

struct KhaState {
  std::vector<ParamVector> positions;
  std::vector<double> costs;
  std::vector<ParamVector> personal_best;
  std::vector<double> personal_cost;
  std::vector<ParamVector> induced;   // N
  std::vector<ParamVector> foraging;  // F
};
KhaState kha_init(Harness& h, const KhaConfig& cfg, std::span<const ParamVector> initial = {});
void kha_step(Harness& h, const KhaConfig& cfg, KhaState& state, int iter);
/// Random direction scaled to d_max * (1 - iter / iterations).
ParamVector kha_diffusion(Harness& h, const KhaConfig& cfg, int iter);

}  // namespace gwl
