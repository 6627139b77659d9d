#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "gwl/error.hpp"
#include "gwl/format.hpp"
#include "gwl/random.hpp"

namespace gwl::cli {

void SynthSpec::validate() const {
  if (length < 3) throw InputError("synth.length must be >= 3");
  if (!(noise >= 0.0)) throw InputError("synth.noise must be >= 0");
  // AR(2) stationarity triangle: both characteristic roots outside the unit circle.
  const bool stable = std::abs(phi2) < 1.0 && phi1 + phi2 < 1.0 && phi2 - phi1 < 1.0;
  if (!stable) {
    throw InputError("synth: AR coefficients (" + format_double(phi1) + ", " + format_double(phi2) +
                     ") are not stationary");
  }
}

TimeSeries synthesize(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  TimeSeries s;
  s.id = "synthetic";
  double h1 = spec.base, h2 = spec.base;
  for (int t = 1; t <= spec.length; ++t) {
    const double h = spec.base + spec.phi1 * (h1 - spec.base) + spec.phi2 * (h2 - spec.base) +
                     spec.amplitude * std::sin(2.0 * std::numbers::pi * t / 12.0) + spec.noise * rng.normal();
    s.months.push_back(t);
    s.levels.push_back(h);
    h2 = h1;
    h1 = h;
  }
  return s;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "data.path",        "synth.length",          "synth.phi1",         "synth.phi2",
      "synth.amplitude",  "synth.noise",           "synth.base",         "synth.seed",
      "lags.max",         "pca.cum_threshold",     "pca.loading_threshold", "pca.max_inputs",
      "pca.loadings_file", "split.test_fraction",  "model.family",       "model.mfs",
      "model.hidden",     "optimizer.name",        "classical.anfis_epochs", "classical.anfis_learn_rate",
      "classical.mlp_epochs", "classical.mlp_learn_rate", "classical.svr_C_grid", "classical.svr_gamma_grid",
      "classical.svr_epsilon", "classical.svr_folds", "tune.enabled",   "tune.mode",
      "tune.repeats",     "tune.iterations",       "uq.enabled",         "uq.draws",
      "uq.level",         "uq.band",               "uq.calibrate",       "uq.budget",
      "uq.m_lo",          "uq.m_hi",               "uq.sigma_lo",        "uq.sigma_hi",
      "uq.m",             "uq.sigma_m",            "seed"};
  return keys;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("config: " + what);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(const KeyValues& kv) {
  ExperimentConfig c;
  for (const auto& [key, value] : kv.entries()) {
    const bool dynamic = key.rfind("optimizer.", 0) == 0 || key.rfind("tune.levels.", 0) == 0;
    if (!dynamic && !known_keys().count(key)) throw InputError("config: unknown key '" + key + "'");
  }
  c.data_path = kv.get("data.path", "");
  c.synth.length = kv.get_int("synth.length", c.synth.length);
  c.synth.phi1 = kv.get_double("synth.phi1", c.synth.phi1);
  c.synth.phi2 = kv.get_double("synth.phi2", c.synth.phi2);
  c.synth.amplitude = kv.get_double("synth.amplitude", c.synth.amplitude);
  c.synth.noise = kv.get_double("synth.noise", c.synth.noise);
  c.synth.base = kv.get_double("synth.base", c.synth.base);
  c.synth.seed = kv.get_u64("synth.seed", c.synth.seed);
  c.max_lag = kv.get_int("lags.max", c.max_lag);
  c.pca_cum_threshold = kv.get_double("pca.cum_threshold", c.pca_cum_threshold);
  c.pca_loading_threshold = kv.get_double("pca.loading_threshold", c.pca_loading_threshold);
  c.pca_max_inputs = kv.get_int("pca.max_inputs", c.pca_max_inputs);
  c.pca_loadings_file = kv.get("pca.loadings_file", "");
  c.test_fraction = kv.get_double("split.test_fraction", c.test_fraction);
  c.family = parse_family(kv.get("model.family", "anfis"));
  c.anfis_mfs = kv.get_int("model.mfs", c.anfis_mfs);
  c.mlp_hidden = kv.get_ints("model.hidden", c.mlp_hidden);
  c.optimizer = kv.get("optimizer.name", c.optimizer);
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("optimizer.", 0) == 0 && key != "optimizer.name") {
      c.optimizer_overrides.emplace_back(key.substr(10), kv.get_double(key, 0.0));
    }
    if (key.rfind("tune.levels.", 0) == 0) c.tune_levels[key.substr(12)] = kv.get_doubles(key);
  }
  ClassicalOptions& o = c.classical;
  o.anfis_epochs = kv.get_int("classical.anfis_epochs", o.anfis_epochs);
  o.anfis_learn_rate = kv.get_double("classical.anfis_learn_rate", o.anfis_learn_rate);
  o.mlp_epochs = kv.get_int("classical.mlp_epochs", o.mlp_epochs);
  o.mlp_learn_rate = kv.get_double("classical.mlp_learn_rate", o.mlp_learn_rate);
  o.svr_C_grid = kv.get_doubles("classical.svr_C_grid", o.svr_C_grid);
  o.svr_gamma_grid = kv.get_doubles("classical.svr_gamma_grid", o.svr_gamma_grid);
  o.svr_epsilon = kv.get_double("classical.svr_epsilon", o.svr_epsilon);
  o.svr_folds = kv.get_int("classical.svr_folds", o.svr_folds);
  c.tune = kv.get_bool("tune.enabled", c.tune);
  if (kv.has("tune.mode")) c.tune_mode = parse_plan_mode(kv.get("tune.mode"));
  c.tune_repeats = kv.get_int("tune.repeats", c.tune_repeats);
  c.tune_iterations = kv.get_int("tune.iterations", c.tune_iterations);
  c.uq = kv.get_bool("uq.enabled", c.uq);
  c.uq_draws = kv.get_int("uq.draws", c.uq_draws);
  c.uq_level = kv.get_double("uq.level", c.uq_level);
  if (kv.has("uq.band")) c.uq_band = parse_band_mode(kv.get("uq.band"));
  c.uq_calibrate = kv.get_bool("uq.calibrate", c.uq_calibrate);
  c.uq_budget = kv.get_int("uq.budget", c.uq_budget);
  c.uq_bounds.m_lo = kv.get_double("uq.m_lo", c.uq_bounds.m_lo);
  c.uq_bounds.m_hi = kv.get_double("uq.m_hi", c.uq_bounds.m_hi);
  c.uq_bounds.sigma_lo = kv.get_double("uq.sigma_lo", c.uq_bounds.sigma_lo);
  c.uq_bounds.sigma_hi = kv.get_double("uq.sigma_hi", c.uq_bounds.sigma_hi);
  c.uq_error.m = kv.get_double("uq.m", c.uq_error.m);
  c.uq_error.sigma_m = kv.get_double("uq.sigma_m", c.uq_error.sigma_m);
  c.seed = kv.get_u64("seed", c.seed);

  if (c.data_path.empty()) c.synth.validate();
  require(c.max_lag >= 1 && c.max_lag <= 12, "lags.max must lie in 1..12");
  require(c.pca_max_inputs >= 1, "pca.max_inputs must be >= 1");
  require(c.test_fraction > 0.0 && c.test_fraction < 1.0, "split.test_fraction must lie in (0, 1)");
  require(c.anfis_mfs >= 1, "model.mfs must be >= 1");
  require(!c.mlp_hidden.empty(), "model.hidden needs at least one layer width");
  for (int w : c.mlp_hidden) require(w >= 1, "model.hidden widths must be positive");
  require(c.tune_repeats >= 1 && c.tune_iterations >= 1, "tune.repeats and tune.iterations must be positive");
  require(c.uq_draws >= 2, "uq.draws must be >= 2");
  require(c.uq_budget >= 1, "uq.budget must be >= 1");
  if (!c.is_classical()) {
    AlgorithmConfig alg = c.algorithm_config();
    validate_config(alg);
  }
  c.uq_error.validate();
  return c;
}

KeyValues ExperimentConfig::to_kv() const {
  KeyValues kv;
  kv.set("data.path", data_path);
  kv.set("synth.length", std::to_string(synth.length));
  kv.set("synth.phi1", synth.phi1);
  kv.set("synth.phi2", synth.phi2);
  kv.set("synth.amplitude", synth.amplitude);
  kv.set("synth.noise", synth.noise);
  kv.set("synth.base", synth.base);
  kv.set("synth.seed", std::to_string(synth.seed));
  kv.set("lags.max", std::to_string(max_lag));
  kv.set("pca.cum_threshold", pca_cum_threshold);
  kv.set("pca.loading_threshold", pca_loading_threshold);
  kv.set("pca.max_inputs", std::to_string(pca_max_inputs));
  kv.set("pca.loadings_file", pca_loadings_file);
  kv.set("split.test_fraction", test_fraction);
  kv.set("model.family", family_name(family));
  kv.set("model.mfs", std::to_string(anfis_mfs));
  kv.set("model.hidden", join_ints(mlp_hidden));
  kv.set("optimizer.name", optimizer);
  if (!is_classical()) {
    for (const auto& [name, value] : config_parameters(algorithm_config())) kv.set("optimizer." + name, value);
  }
  kv.set("classical.anfis_epochs", std::to_string(classical.anfis_epochs));
  kv.set("classical.anfis_learn_rate", classical.anfis_learn_rate);
  kv.set("classical.mlp_epochs", std::to_string(classical.mlp_epochs));
  kv.set("classical.mlp_learn_rate", classical.mlp_learn_rate);
  kv.set("classical.svr_C_grid", join_list(classical.svr_C_grid));
  kv.set("classical.svr_gamma_grid", join_list(classical.svr_gamma_grid));
  kv.set("classical.svr_epsilon", classical.svr_epsilon);
  kv.set("classical.svr_folds", std::to_string(classical.svr_folds));
  kv.set("tune.enabled", tune ? "true" : "false");
  kv.set("tune.mode", tune_mode == PlanMode::FullFactorial ? "full_factorial" : "one_at_a_time");
  kv.set("tune.repeats", std::to_string(tune_repeats));
  kv.set("tune.iterations", std::to_string(tune_iterations));
  for (const auto& [name, values] : tune_levels) kv.set("tune.levels." + name, join_list(values));
  kv.set("uq.enabled", uq ? "true" : "false");
  kv.set("uq.draws", std::to_string(uq_draws));
  kv.set("uq.level", uq_level);
  kv.set("uq.band", uq_band == BandMode::Bma ? "bma" : "quantile");
  kv.set("uq.calibrate", uq_calibrate ? "true" : "false");
  kv.set("uq.budget", std::to_string(uq_budget));
  kv.set("uq.m_lo", uq_bounds.m_lo);
  kv.set("uq.m_hi", uq_bounds.m_hi);
  kv.set("uq.sigma_lo", uq_bounds.sigma_lo);
  kv.set("uq.sigma_hi", uq_bounds.sigma_hi);
  kv.set("uq.m", uq_error.m);
  kv.set("uq.sigma_m", uq_error.sigma_m);
  kv.set("seed", std::to_string(seed));
  return kv;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_kv().serialize()); }

AlgorithmConfig ExperimentConfig::algorithm_config() const {
  AlgorithmConfig alg = default_config(optimizer);
  for (const auto& [name, value] : optimizer_overrides) set_parameter(alg, name, value);
  return alg;
}

ModelSpec ExperimentConfig::model_spec(int n_inputs) const {
  ModelSpec spec;
  spec.family = family;
  spec.anfis.mfs_per_input = anfis_mfs;
  spec.mlp.widths = {n_inputs};
  spec.mlp.widths.insert(spec.mlp.widths.end(), mlp_hidden.begin(), mlp_hidden.end());
  spec.mlp.widths.push_back(1);
  spec.set_inputs(n_inputs);
  spec.validate();
  return spec;
}

std::vector<FactorLevels> ExperimentConfig::factor_levels() const {
  std::vector<FactorLevels> levels = default_levels(optimizer);
  for (const auto& [name, values] : tune_levels) {
    auto it = std::find_if(levels.begin(), levels.end(), [&](const FactorLevels& f) { return f.name == name; });
    if (it != levels.end()) {
      it->values = values;
    } else {
      levels.push_back({name, values});
    }
  }
  return levels;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path) {
  if (!path) return ExperimentConfig::from_kv(KeyValues{});
  return ExperimentConfig::from_kv(KeyValues::read(*path));
}

std::uint64_t stage_seed(const ExperimentConfig& cfg, Stream s) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
}

SelectionOutcome choose_lags(const LoadingTable& table, const ExperimentConfig& cfg) {
  SelectionOutcome out;
  try {
    out.selection = select_lags(table, cfg.pca_cum_threshold, cfg.pca_loading_threshold);
    if (static_cast<int>(out.selection.lags.size()) <= cfg.pca_max_inputs) return out;
  } catch (const NumericError&) {
    out.selection = select_lags(table, cfg.pca_cum_threshold, 0.0);
  }
  out.fallback = true;
  const int kept = out.selection.components_kept;
  std::vector<std::pair<double, int>> ranked;
  for (Eigen::Index i = 0; i < table.loadings.rows(); ++i) {
    const int lag = table.lags[static_cast<std::size_t>(i)];
    const auto& current = out.selection.lags;
    if (std::find(current.begin(), current.end(), lag) == current.end()) continue;
    double communality = 0.0;
    for (int p = 0; p < kept; ++p) communality += table.loadings(i, p) * table.loadings(i, p);
    ranked.emplace_back(-communality, lag);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> lags;
  for (std::size_t k = 0; k < ranked.size() && static_cast<int>(k) < cfg.pca_max_inputs; ++k) {
    lags.push_back(ranked[k].second);
  }
  std::sort(lags.begin(), lags.end());
  out.selection.lags = lags;
  return out;
}

}  // namespace gwl::cli
