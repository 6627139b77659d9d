#include "reports.hpp"

#include <sstream>

#include "gwl/error.hpp"
#include "gwl/format.hpp"

namespace gwl::cli {

namespace {

std::string join_ints(std::span<const int> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::vector<double> row_of(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), m.data() + (r + 1) * m.cols()};
}

}  // namespace

std::string loading_report(const LoadingTable& table, const SelectionOutcome& outcome, const ExperimentConfig& cfg) {
  std::ostringstream out;
  const Eigen::Index nc = table.loadings.cols();
  out << "# Principal component loadings (dimensionless) and explained variance (fraction)\n#\n# " << pad("input", 10);
  for (Eigen::Index p = 0; p < nc; ++p) out << pad("PC" + std::to_string(p + 1), 8);
  out << '\n';
  for (Eigen::Index i = 0; i < table.loadings.rows(); ++i) {
    out << "# " << pad("H(t-" + std::to_string(table.lags[static_cast<std::size_t>(i)]) + ")", 10);
    for (Eigen::Index p = 0; p < nc; ++p) out << pad(format_fixed(table.loadings(i, p), 3), 8);
    out << '\n';
  }
  out << "# " << pad("cumulative", 10);
  for (Eigen::Index p = 0; p < nc; ++p) out << pad(format_fixed(table.cumulative(p), 3), 8);
  out << "\n#\n# kept components: " << outcome.selection.components_kept
      << ", selected lags: " << join_ints(outcome.selection.lags)
      << (outcome.fallback ? " (ranked by communality)" : " (loading threshold)") << "\n";

  KeyValues kv;
  kv.set("units", "loadings dimensionless; explained and cumulative as variance fractions");
  kv.set("lags", join_ints(table.lags));
  kv.set("explained", join_doubles(std::vector<double>(table.explained.data(), table.explained.data() + table.explained.size())));
  kv.set("cumulative", join_doubles(std::vector<double>(table.cumulative.data(), table.cumulative.data() + table.cumulative.size())));
  for (Eigen::Index i = 0; i < table.loadings.rows(); ++i) {
    kv.set("loading." + std::to_string(table.lags[static_cast<std::size_t>(i)]), join_doubles(row_of(table.loadings, i)));
  }
  kv.set("cum_threshold", cfg.pca_cum_threshold);
  kv.set("loading_threshold", cfg.pca_loading_threshold);
  kv.set("components_kept", std::to_string(outcome.selection.components_kept));
  kv.set("selected", join_ints(outcome.selection.lags));
  kv.set("selection", outcome.fallback ? "communality" : "threshold");
  out << kv.serialize();
  return out.str();
}

LoadingTable parse_loading_table(const KeyValues& kv) {
  LoadingTable t;
  t.lags = kv.get_ints("lags");
  const std::vector<double> cum = kv.get_doubles("cumulative");
  if (t.lags.empty() || cum.empty()) throw InputError("loading table needs 'lags' and 'cumulative'");
  t.cumulative = Eigen::Map<const Vector>(cum.data(), static_cast<Eigen::Index>(cum.size()));
  std::vector<double> expl = kv.get_doubles("explained");
  if (expl.empty()) {
    double prev = 0.0;
    for (double c : cum) {
      expl.push_back(c - prev);
      prev = c;
    }
  }
  if (expl.size() != cum.size()) throw InputError("loading table: 'explained' and 'cumulative' differ in length");
  t.explained = Eigen::Map<const Vector>(expl.data(), static_cast<Eigen::Index>(expl.size()));
  t.loadings.resize(static_cast<Eigen::Index>(t.lags.size()), static_cast<Eigen::Index>(cum.size()));
  for (std::size_t i = 0; i < t.lags.size(); ++i) {
    const std::vector<double> row = kv.get_doubles("loading." + std::to_string(t.lags[i]));
    if (row.size() != cum.size()) {
      throw InputError("loading table: row for lag " + std::to_string(t.lags[i]) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(cum.size()));
    }
    for (std::size_t p = 0; p < row.size(); ++p) t.loadings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = row[p];
  }
  t.zero_variance.assign(t.lags.size(), false);
  return t;
}

std::string split_report(const SplitIndices& split, const LaggedDataset& data, std::uint64_t config_hash) {
  auto months = [&](const std::vector<std::size_t>& rows) {
    std::vector<int> m;
    for (std::size_t r : rows) m.push_back(data.target_months[r]);
    return join_ints(m);
  };
  auto indices = [](const std::vector<std::size_t>& rows) {
    std::string s;
    for (std::size_t i = 0; i < rows.size(); ++i) s += (i ? "," : "") + std::to_string(rows[i]);
    return s;
  };
  std::ostringstream out;
  out << "# Train/test split of the lagged rows (row indices and target months)\n";
  KeyValues kv;
  kv.set("rows", std::to_string(data.rows()));
  kv.set("lags", join_ints(data.lags));
  kv.set("seed", std::to_string(split.seed));
  kv.set("train", indices(split.train));
  kv.set("test", indices(split.test));
  kv.set("train_months", months(split.train));
  kv.set("test_months", months(split.test));
  kv.set("config_hash", hex64(config_hash));
  out << kv.serialize();
  return out.str();
}

std::string sn_report(const TrialPlan& plan, const std::vector<std::vector<double>>& costs, const SnTable& table,
                      int repeats, int iterations) {
  std::ostringstream out;
  out << "# Taguchi signal-to-noise table (dB, smaller-the-better on training RMSE in scaled units)\n#\n";
  for (std::size_t f = 0; f < table.factors.size(); ++f) {
    out << "# " << pad(table.factors[f].name, 12) << pad("S/N", 8) << '\n';
    for (std::size_t l = 0; l < table.factors[f].values.size(); ++l) {
      out << "#   " << pad(format_double(table.factors[f].values[l]), 10) << pad(format_fixed(table.mean_sn[f][l], 3), 8)
          << (static_cast<int>(l) == table.best[f] ? "best" : "") << '\n';
    }
  }
  KeyValues kv;
  kv.set("units", "S/N in dB; trial costs are RMSE in scaled units");
  kv.set("repeats", std::to_string(repeats));
  kv.set("iterations", std::to_string(iterations));
  kv.set("trials", std::to_string(plan.trials.size()));
  for (std::size_t f = 0; f < table.factors.size(); ++f) {
    const std::string key = "factor." + table.factors[f].name;
    kv.set(key + ".levels", join_doubles(table.factors[f].values, ','));
    kv.set(key + ".sn", join_doubles(table.mean_sn[f], ','));
    kv.set(key + ".best", table.best_value(f));
  }
  for (std::size_t t = 0; t < plan.trials.size(); ++t) {
    kv.set("trial." + std::to_string(t), join_doubles(plan.values(t), ',') + " | " + join_doubles(costs[t], ','));
  }
  out << kv.serialize();
  return out.str();
}

std::string trace_report(const std::vector<double>& trace) {
  std::ostringstream out;
  out << "# iteration best_cost (training RMSE, scaled units)\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ' ' << format_double(trace[i]) << '\n';
  return out.str();
}

std::string metrics_report(const TrainedModel& model, const MetricsReport& train, std::size_t n_train,
                           const MetricsReport& test, std::size_t n_test) {
  std::ostringstream out;
  out << "# Skill scores; predictions inverse-scaled to meters before scoring\n#\n# " << pad("split", 7) << pad("n", 5)
      << pad("RMSE(m)", 10) << pad("MAE(m)", 10) << pad("NSE", 8) << pad("PBIAS(%)", 10) << "R2\n";
  auto line = [&](const std::string& name, const MetricsReport& m, std::size_t n) {
    out << "# " << pad(name, 7) << pad(std::to_string(n), 5) << pad(format_fixed(m.rmse, 4), 10)
        << pad(format_fixed(m.mae, 4), 10) << pad(format_fixed(m.nse, 4), 8) << pad(format_fixed(m.pbias, 4), 10)
        << format_fixed(m.r2, 4) << '\n';
  };
  line("train", train, n_train);
  line("test", test, n_test);
  KeyValues kv;
  kv.set("units", "rmse and mae in m; pbias in percent; nse and r2 dimensionless");
  kv.set("model", family_name(model.spec.family) + "-" + model.algorithm);
  auto put = [&](const std::string& split, const MetricsReport& m, std::size_t n) {
    kv.set(split + ".n", std::to_string(n));
    kv.set(split + ".rmse", m.rmse);
    kv.set(split + ".mae", m.mae);
    kv.set(split + ".nse", m.nse);
    kv.set(split + ".pbias", m.pbias);
    kv.set(split + ".r2", m.r2);
  };
  put("train", train, n_train);
  put("test", test, n_test);
  out << kv.serialize();
  return out.str();
}

std::string uq_report(const UqSummary& s) {
  std::ostringstream out;
  out << "# Uncertainty of test predictions; band bounds in meters, p and d dimensionless\n"
      << "# weights from expectation-maximization on the training ensemble\n#\n"
      << "# p-factor " << format_fixed(s.p, 4) << "   d-factor " << format_fixed(s.d, 4) << '\n';
  KeyValues kv;
  kv.set("units", "m and sigma_m dimensionless multipliers; bma.sigmas in m; p and d dimensionless");
  kv.set("input_error.m", s.error.m);
  kv.set("input_error.sigma_m", s.error.sigma_m);
  kv.set("input_error.source", s.calibrated ? "dds" : "config");
  if (s.calibrated) kv.set("input_error.loglik", s.calibration_loglik);
  kv.set("band.mode", s.mode == BandMode::Bma ? "bma" : "quantile");
  kv.set("band.level", s.level);
  kv.set("members", std::to_string(s.members));
  kv.set("bma.method", "expectation-maximization");
  kv.set("bma.weights", join_doubles(s.bma.weights, ','));
  kv.set("bma.sigmas", join_doubles(s.bma.sigmas, ','));
  kv.set("bma.loglik", s.bma.log_likelihood);
  kv.set("bma.iterations", std::to_string(s.bma.iterations));
  kv.set("p_factor", s.p);
  kv.set("d_factor", s.d);
  out << kv.serialize();
  return out.str();
}

std::string band_csv(const std::vector<int>& months, std::span<const double> obs, const Band& band) {
  std::ostringstream out;
  out << "month,obs_m,lower_m,upper_m\n";
  for (std::size_t j = 0; j < obs.size(); ++j) {
    out << months[j] << ',' << format_double(obs[j]) << ',' << format_double(band.lower[j]) << ','
        << format_double(band.upper[j]) << '\n';
  }
  return out.str();
}

std::string compare_report(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "# Test-split comparison; RMSE and MAE in m, PBIAS in percent, improvement = RMSE reduction vs the first "
         "config in percent\n";
  out << pad("config", 24) << pad("seed", 8) << pad("rmse_m", 12) << pad("mae_m", 12) << pad("nse", 10)
      << pad("pbias_pct", 12) << pad("r2", 10) << "improvement_pct\n";
  for (const CompareRow& r : rows) {
    out << pad(r.config, 24) << pad(r.seed, 8) << pad(format_fixed(r.test.rmse, 5), 12)
        << pad(format_fixed(r.test.mae, 5), 12) << pad(format_fixed(r.test.nse, 4), 10)
        << pad(format_fixed(r.test.pbias, 4), 12) << pad(format_fixed(r.test.r2, 4), 10)
        << format_fixed(r.improvement, 2) << '\n';
  }
  return out.str();
}

}  // namespace gwl::cli
