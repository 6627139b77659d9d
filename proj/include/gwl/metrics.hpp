#pragma once

#include <span>

namespace gwl {

/// Skill scores for one model on one split. Length units follow the inputs.
struct MetricsReport {
  double rmse = 0.0;
  double mae = 0.0;
  double nse = 0.0;
  double pbias = 0.0;  // percent, signed
  double r2 = 0.0;
};

double rmse(std::span<const double> obs, std::span<const double> pred);
double mae(std::span<const double> obs, std::span<const double> pred);
/// Nash-Sutcliffe efficiency; throws when obs is constant.
double nse(std::span<const double> obs, std::span<const double> pred);
/// 100 * sum(pred - obs) / sum(obs).
double pbias(std::span<const double> obs, std::span<const double> pred);
/// Squared Pearson correlation; throws when either side is constant.
double r2(std::span<const double> obs, std::span<const double> pred);

MetricsReport compute_metrics(std::span<const double> obs, std::span<const double> pred);

}  // namespace gwl
