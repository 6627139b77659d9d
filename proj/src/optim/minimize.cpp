#include <cmath>
#include <type_traits>

#include "gwl/error.hpp"
#include "gwl/optim/algorithms.hpp"

namespace gwl {

AlgorithmConfig default_config(const std::string& algorithm) {
  if (algorithm == "goa") return GoaConfig{};
  if (algorithm == "pso") return PsoConfig{};
  if (algorithm == "ga") return GaConfig{};
  if (algorithm == "wa" || algorithm == "iwo") return WaConfig{};
  if (algorithm == "cso") return CsoConfig{};
  if (algorithm == "kha" || algorithm == "ka") return KhaConfig{};
  throw InputError("unknown optimizer '" + algorithm + "' (expected goa, pso, ga, wa, cso or kha)");
}

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace

std::string algorithm_name(const AlgorithmConfig& config) {
  return std::visit(Overload{[](const GoaConfig&) { return std::string("goa"); },
                             [](const PsoConfig&) { return std::string("pso"); },
                             [](const GaConfig&) { return std::string("ga"); },
                             [](const WaConfig&) { return std::string("wa"); },
                             [](const CsoConfig&) { return std::string("cso"); },
                             [](const KhaConfig&) { return std::string("kha"); }},
                    config);
}

int config_iterations(const AlgorithmConfig& config) {
  return std::visit([](const auto& c) { return c.iterations; }, config);
}

void set_iterations(AlgorithmConfig& config, int iterations) {
  std::visit([iterations](auto& c) { c.iterations = iterations; }, config);
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

void check_probability(double p, const std::string& name) {
  require(p >= 0.0 && p <= 1.0, name + " must lie in [0, 1]");
}

}  // namespace

void validate_config(const AlgorithmConfig& config) {
  require(config_iterations(config) > 0, "iterations must be positive");
  std::visit(Overload{[](const GoaConfig& c) {
                        require(c.population >= 2, "goa.population must be >= 2");
                        require(c.l > 0.0, "goa.l must be positive");
                        require(c.c_max >= c.c_min && c.c_min > 0.0, "goa needs c_max >= c_min > 0");
                      },
                      [](const PsoConfig& c) {
                        require(c.population >= 1, "pso.population must be positive");
                        require(c.c1 >= 0.0 && c.c2 >= 0.0, "pso acceleration coefficients must be >= 0");
                        require(c.inertia > 0.0 && c.inertia <= 1.0, "pso.inertia must lie in (0, 1]");
                        require(c.inertia_final > 0.0 && c.inertia_final <= 1.0, "pso.inertia_final must lie in (0, 1]");
                        require(c.v_max > 0.0, "pso.v_max must be positive");
                      },
                      [](const GaConfig& c) {
                        require(c.population >= 2, "ga.population must be >= 2");
                        check_probability(c.mutation_prob, "ga.mutation_prob");
                        check_probability(c.crossover_rate, "ga.crossover_rate");
                        require(c.elitism >= 0 && c.elitism < c.population, "ga.elitism must lie in [0, population)");
                        require(c.mutation_scale >= 0.0, "ga.mutation_scale must be >= 0");
                      },
                      [](const WaConfig& c) {
                        require(c.initial_population >= 1, "wa.initial_population must be positive");
                        require(c.p_max >= c.initial_population, "wa.p_max must be >= wa.initial_population");
                        require(c.s_max >= c.s_min && c.s_min >= 0, "wa needs s_max >= s_min >= 0");
                        require(c.sigma_init >= c.sigma_final && c.sigma_final > 0.0, "wa needs sigma_init >= sigma_final > 0");
                        require(c.modulation >= 0.0, "wa.modulation must be >= 0");
                      },
                      [](const CsoConfig& c) {
                        require(c.population >= 1, "cso.population must be positive");
                        require(c.smp >= 1, "cso.smp must be >= 1");
                        check_probability(c.mr, "cso.mr");
                        check_probability(c.cdc, "cso.cdc");
                        require(c.srd >= 0.0, "cso.srd must be >= 0");
                        require(c.v_max > 0.0, "cso.v_max must be positive");
                      },
                      [](const KhaConfig& c) {
                        require(c.population >= 2, "kha.population must be >= 2");
                        require(c.v_f > 0.0 && c.n_max > 0.0 && c.d_max > 0.0, "kha speeds must be positive");
                        require(c.ct > 0.0, "kha.ct must be positive");
                        check_probability(c.inertia_n, "kha.inertia_n");
                        check_probability(c.inertia_f, "kha.inertia_f");
                      }},
             config);
}

RunResult minimize(const Objective& objective, const AlgorithmConfig& config, std::uint64_t seed,
                   std::span<const ParamVector> initial) {
  validate_config(config);
  Harness h(objective, seed);
  const int iters = config_iterations(config);
  std::visit(Overload{[&](const GoaConfig& c) {
                        GoaState s = goa_init(h, c, initial);
                        h.record();
                        for (int it = 1; it <= iters; ++it) {
                          goa_step(h, c, s, it);
                          h.record();
                        }
                      },
                      [&](const PsoConfig& c) {
                        PsoState s = pso_init(h, c, initial);
                        h.record();
                        for (int it = 1; it <= iters; ++it) {
                          pso_step(h, c, s, it);
                          h.record();
                        }
                      },
                      [&](const GaConfig& c) {
                        GaState s = ga_init(h, c, initial);
                        h.record();
                        for (int it = 1; it <= iters; ++it) {
                          ga_step(h, c, s);
                          h.record();
                        }
                      },
                      [&](const WaConfig& c) {
                        WaState s = iwo_init(h, c, initial);
                        h.record();
                        for (int it = 1; it <= iters; ++it) {
                          iwo_step(h, c, s, it);
                          h.record();
                        }
                      },
                      [&](const CsoConfig& c) {
                        CsoState s = cso_init(h, c, initial);
                        h.record();
                        for (int it = 1; it <= iters; ++it) {
                          cso_step(h, c, s);
                          h.record();
                        }
                      },
                      [&](const KhaConfig& c) {
                        KhaState s = kha_init(h, c, initial);
                        h.record();
                        for (int it = 1; it <= iters; ++it) {
                          kha_step(h, c, s, it);
                          h.record();
                        }
                      }},
             config);
  return h.finish(algorithm_name(config));
}

}  // namespace gwl

namespace gwl {

namespace {

// Binds field names to members for one config type.
template <class C>
struct Field {
  const char* name;
  double C::*real = nullptr;
  int C::*integer = nullptr;
};

template <class C>
std::vector<Field<C>> fields();

template <>
std::vector<Field<GoaConfig>> fields() {
  return {{"population", nullptr, &GoaConfig::population}, {"iterations", nullptr, &GoaConfig::iterations},
          {"l", &GoaConfig::l},         {"f", &GoaConfig::f},
          {"c_max", &GoaConfig::c_max}, {"c_min", &GoaConfig::c_min},
          {"g", &GoaConfig::g},         {"u", &GoaConfig::u}};
}

template <>
std::vector<Field<PsoConfig>> fields() {
  return {{"population", nullptr, &PsoConfig::population}, {"iterations", nullptr, &PsoConfig::iterations},
          {"c1", &PsoConfig::c1},
          {"c2", &PsoConfig::c2},
          {"inertia", &PsoConfig::inertia},
          {"inertia_final", &PsoConfig::inertia_final},
          {"v_max", &PsoConfig::v_max}};
}

template <>
std::vector<Field<GaConfig>> fields() {
  return {{"population", nullptr, &GaConfig::population}, {"iterations", nullptr, &GaConfig::iterations},
          {"mutation_prob", &GaConfig::mutation_prob},    {"crossover_rate", &GaConfig::crossover_rate},
          {"elitism", nullptr, &GaConfig::elitism},       {"mutation_scale", &GaConfig::mutation_scale}};
}

template <>
std::vector<Field<WaConfig>> fields() {
  return {{"initial_population", nullptr, &WaConfig::initial_population},
          {"p_max", nullptr, &WaConfig::p_max},
          {"iterations", nullptr, &WaConfig::iterations},
          {"modulation", &WaConfig::modulation},
          {"s_min", nullptr, &WaConfig::s_min},
          {"s_max", nullptr, &WaConfig::s_max},
          {"sigma_init", &WaConfig::sigma_init},
          {"sigma_final", &WaConfig::sigma_final}};
}

template <>
std::vector<Field<CsoConfig>> fields() {
  return {{"population", nullptr, &CsoConfig::population}, {"iterations", nullptr, &CsoConfig::iterations},
          {"smp", nullptr, &CsoConfig::smp},
          {"srd", &CsoConfig::srd},
          {"cdc", &CsoConfig::cdc},
          {"mr", &CsoConfig::mr},
          {"c1", &CsoConfig::c1},
          {"inertia", &CsoConfig::inertia},
          {"v_max", &CsoConfig::v_max}};
}

template <>
std::vector<Field<KhaConfig>> fields() {
  return {{"population", nullptr, &KhaConfig::population}, {"iterations", nullptr, &KhaConfig::iterations},
          {"v_f", &KhaConfig::v_f},
          {"n_max", &KhaConfig::n_max},
          {"d_max", &KhaConfig::d_max},
          {"inertia_n", &KhaConfig::inertia_n},
          {"inertia_f", &KhaConfig::inertia_f},
          {"ct", &KhaConfig::ct}};
}

}  // namespace

std::vector<std::pair<std::string, double>> config_parameters(const AlgorithmConfig& config) {
  return std::visit(
      [](const auto& c) {
        using C = std::decay_t<decltype(c)>;
        std::vector<std::pair<std::string, double>> out;
        for (const Field<C>& f : fields<C>()) {
          out.emplace_back(f.name, f.real ? c.*(f.real) : static_cast<double>(c.*(f.integer)));
        }
        return out;
      },
      config);
}

void set_parameter(AlgorithmConfig& config, const std::string& name, double value) {
  std::visit(
      [&](auto& c) {
        using C = std::decay_t<decltype(c)>;
        for (const Field<C>& f : fields<C>()) {
          if (name != f.name) continue;
          if (f.real) {
            c.*(f.real) = value;
          } else {
            if (!std::isfinite(value)) throw InputError("parameter " + name + " must be finite");
            c.*(f.integer) = static_cast<int>(std::lround(value));
          }
          return;
        }
        throw InputError("optimizer " + algorithm_name(config) + " has no parameter '" + name + "'");
      },
      config);
}

}  // namespace gwl
