#include "gwl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gwl/error.hpp"

namespace gwl {

namespace {

void check_pair(std::span<const double> obs, std::span<const double> pred, const char* what) {
  if (obs.size() != pred.size()) {
    throw InputError(std::string(what) + ": length mismatch (" + std::to_string(obs.size()) + " vs " +
                     std::to_string(pred.size()) + ")");
  }
  if (obs.empty()) throw InputError(std::string(what) + ": empty input");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double rmse(std::span<const double> obs, std::span<const double> pred) {
  check_pair(obs, pred, "rmse");
  double s = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) s += (pred[i] - obs[i]) * (pred[i] - obs[i]);
  return std::sqrt(s / static_cast<double>(obs.size()));
}

double mae(std::span<const double> obs, std::span<const double> pred) {
  check_pair(obs, pred, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) s += std::abs(pred[i] - obs[i]);
  return s / static_cast<double>(obs.size());
}

double nse(std::span<const double> obs, std::span<const double> pred) {
  check_pair(obs, pred, "nse");
  const double m = mean(obs);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    num += (pred[i] - obs[i]) * (pred[i] - obs[i]);
    den += (obs[i] - m) * (obs[i] - m);
  }
  if (!(den > 0.0)) throw InputError("NSE undefined: observations are constant");
  return 1.0 - num / den;
}

double pbias(std::span<const double> obs, std::span<const double> pred) {
  check_pair(obs, pred, "pbias");
  double diff = 0.0, total = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    diff += pred[i] - obs[i];
    total += obs[i];
  }
  if (total == 0.0) throw InputError("PBIAS undefined: observations sum to zero");
  return 100.0 * diff / total;
}

double r2(std::span<const double> obs, std::span<const double> pred) {
  check_pair(obs, pred, "r2");
  const double mo = mean(obs), mp = mean(pred);
  double sop = 0.0, soo = 0.0, spp = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    sop += (obs[i] - mo) * (pred[i] - mp);
    soo += (obs[i] - mo) * (obs[i] - mo);
    spp += (pred[i] - mp) * (pred[i] - mp);
  }
  if (!(soo > 0.0) || !(spp > 0.0)) throw InputError("R² undefined: constant input");
  const double r = sop / std::sqrt(soo * spp);
  return std::min(1.0, r * r);
}

MetricsReport compute_metrics(std::span<const double> obs, std::span<const double> pred) {
  MetricsReport m;
  m.rmse = rmse(obs, pred);
  m.mae = mae(obs, pred);
  m.nse = nse(obs, pred);
  m.pbias = pbias(obs, pred);
  m.r2 = r2(obs, pred);
  return m;
}

}  // namespace gwl
