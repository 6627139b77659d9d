#pragma once

#include <string>
#include <vector>

#include "experiment.hpp"

namespace gwl::cli {

inline constexpr const char* kVersion = "gwl 0.1.0";

std::string loading_report(const LoadingTable& table, const SelectionOutcome& outcome, const ExperimentConfig& cfg);
LoadingTable parse_loading_table(const KeyValues& kv);

std::string split_report(const SplitIndices& split, const LaggedDataset& data, std::uint64_t config_hash);

std::string sn_report(const TrialPlan& plan, const std::vector<std::vector<double>>& costs, const SnTable& table,
                      int repeats, int iterations);

/// Two columns: iteration, best-so-far cost.
std::string trace_report(const std::vector<double>& trace);

std::string metrics_report(const TrainedModel& model, const MetricsReport& train, std::size_t n_train,
                           const MetricsReport& test, std::size_t n_test);

struct UqSummary {
  InputErrorModel error;
  bool calibrated = false;
  double calibration_loglik = 0.0;
  BmaFit bma;
  BandMode mode = BandMode::Bma;
  double level = 0.95;
  double p = 0.0;
  double d = 0.0;
  int members = 0;
};

std::string uq_report(const UqSummary& s);
std::string band_csv(const std::vector<int>& months, std::span<const double> obs, const Band& band);

struct CompareRow {
  std::string config;
  std::string seed;  // "median" on summary rows
  MetricsReport test;
  double improvement = 0.0;  // percent RMSE reduction against the first config
};

std::string compare_report(const std::vector<CompareRow>& rows);

}  // namespace gwl::cli
