#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gwl/dataset.hpp"
#include "gwl/kv.hpp"
#include "gwl/optim/algorithms.hpp"
#include "gwl/pca.hpp"
#include "gwl/taguchi.hpp"
#include "gwl/trainer.hpp"
#include "gwl/uncertainty.hpp"

namespace gwl::cli {

/// AR(2) plus annual sine plus Gaussian noise around a base level.
struct SynthSpec {
  int length = 140;
  double phi1 = 0.6;
  double phi2 = 0.2;
  double amplitude = 1.5;
  double noise = 0.3;
  double base = 20.0;
  std::uint64_t seed = 42;

  void validate() const;
};

TimeSeries synthesize(const SynthSpec& spec, std::uint64_t seed);

struct ExperimentConfig {
  std::string data_path;  // empty: synthesize
  SynthSpec synth;

  int max_lag = 12;
  double pca_cum_threshold = 0.90;
  double pca_loading_threshold = 0.75;
  int pca_max_inputs = 5;
  std::string pca_loadings_file;  // precomputed loading table; skips PCA on data

  double test_fraction = 0.2;

  ModelFamily family = ModelFamily::Anfis;
  int anfis_mfs = 2;
  std::vector<int> mlp_hidden{10};
  std::string optimizer = "goa";  // or "classical"
  std::vector<std::pair<std::string, double>> optimizer_overrides;
  ClassicalOptions classical;

  bool tune = false;
  PlanMode tune_mode = PlanMode::OneAtATime;
  int tune_repeats = 3;
  int tune_iterations = 20;
  std::map<std::string, std::vector<double>> tune_levels;

  bool uq = true;
  int uq_draws = 20;
  double uq_level = 0.95;
  BandMode uq_band = BandMode::Bma;
  bool uq_calibrate = true;
  int uq_budget = 100;
  ErrorBounds uq_bounds;
  InputErrorModel uq_error{1.0, 0.02};

  std::uint64_t seed = 1;

  static ExperimentConfig from_kv(const KeyValues& kv);
  /// Fully resolved settings, including defaults.
  KeyValues to_kv() const;
  std::uint64_t hash() const;

  bool is_classical() const { return optimizer == "classical"; }
  AlgorithmConfig algorithm_config() const;
  ModelSpec model_spec(int n_inputs) const;
  std::vector<FactorLevels> factor_levels() const;
};

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path);

/// Stage seeds derived from the run seed.
enum class Stream : std::uint64_t { Split = 1, Train = 2, Tune = 3, Uq = 4 };
std::uint64_t stage_seed(const ExperimentConfig& cfg, Stream s);

struct SelectionOutcome {
  LagSelection selection;
  bool fallback = false;  // true when the threshold rule was replaced by communality ranking
};

/// Threshold rule first. When it selects nothing, or more than
/// pca_max_inputs lags, the lags with the largest communality over the kept
/// components are used instead, capped at pca_max_inputs.
SelectionOutcome choose_lags(const LoadingTable& table, const ExperimentConfig& cfg);

}  // namespace gwl::cli
