#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/format.hpp"
#include "gwl/model_file.hpp"
#include "gwl/random.hpp"

namespace gwl::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void log_event(const GlobalOptions& opts, const std::string& what) {
  fs::create_directories(opts.out);
  std::ofstream log(opts.out / files::log, std::ios::app);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  log << stamp << ' ' << what << '\n';
}

/// Runs one stage, prefixing any error message with the stage name.
template <typename F>
auto stage(const GlobalOptions& opts, const std::string& name, F&& body) {
  try {
    log_event(opts, name + " start");
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      log_event(opts, name + " done");
    } else {
      auto r = body();
      log_event(opts, name + " done");
      return r;
    }
  } catch (const InputError& e) {
    throw InputError(name + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(name + ": " + e.what());
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(name + ": " + e.what());
  }
}

ExperimentConfig stage_config(const GlobalOptions& opts) {
  std::optional<fs::path> path = opts.config;
  if (!path && fs::exists(opts.out / files::config)) path = opts.out / files::config;
  ExperimentConfig cfg = load_config(path);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

KeyValues read_artifact(const GlobalOptions& opts, const char* name, const char* producer) {
  const fs::path path = opts.out / name;
  if (!fs::exists(path)) throw InputError(path.string() + " not found; run '" + producer + "' first");
  return KeyValues::read(path);
}

void check_hash(const KeyValues& kv, const ExperimentConfig& cfg, const char* name) {
  if (kv.get("config_hash") != hex64(cfg.hash())) {
    throw InputError(std::string(name) + " was produced under a different config or seed; rerun 'prepare'");
  }
}

/// The lagged rows over 1..max_lag and their split, as written by prepare.
struct Prepared {
  LaggedDataset full;
  SplitIndices split;
  LaggedDataset train;
  LaggedDataset test;
};

std::vector<std::size_t> to_indices(const std::vector<int>& v) {
  std::vector<std::size_t> out;
  for (int i : v) {
    if (i < 0) throw InputError("negative row index in split");
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

Prepared load_prepared(const GlobalOptions& opts, const ExperimentConfig& cfg) {
  const fs::path series_path = opts.out / files::series;
  if (!fs::exists(series_path)) throw InputError(series_path.string() + " not found; run 'prepare' first");
  const KeyValues split_kv = read_artifact(opts, files::split, "prepare");
  check_hash(split_kv, cfg, files::split);
  Prepared p;
  p.full = build_lagged(read_series(series_path), lag_range(cfg.max_lag));
  p.split.train = to_indices(split_kv.get_ints("train"));
  p.split.test = to_indices(split_kv.get_ints("test"));
  p.split.seed = std::stoull(split_kv.get("seed"));
  for (const auto* part : {&p.split.train, &p.split.test}) {
    for (std::size_t r : *part) {
      if (r >= p.full.rows()) throw InputError("split row index out of range; rerun 'prepare'");
    }
  }
  p.train = p.full.subset(p.split.train);
  p.test = p.full.subset(p.split.test);
  return p;
}

std::vector<int> selected_lags(const GlobalOptions& opts, const ExperimentConfig& cfg) {
  const KeyValues kv = read_artifact(opts, files::loadings, "select");
  check_hash(kv, cfg, files::loadings);
  std::vector<int> lags = kv.get_ints("selected");
  if (lags.empty()) throw InputError("no lags selected");
  return lags;
}

void write_series_file(const fs::path& path, const TimeSeries& series) {
  std::ostringstream s;
  write_series(s, series);
  write_text(path, s.str());
}

/// Applies the tuned levels when sn_table.txt belongs to this run and optimizer.
void apply_tuning(const GlobalOptions& opts, const ExperimentConfig& cfg, AlgorithmConfig& alg) {
  const fs::path path = opts.out / files::sn_table;
  if (!fs::exists(path)) return;
  const KeyValues kv = KeyValues::read(path);
  if (kv.get("config_hash", "") != hex64(cfg.hash()) || kv.get("algorithm", "") != algorithm_name(alg)) return;
  for (const auto& [key, value] : kv.entries()) {
    const std::string prefix = "factor.", suffix = ".best";
    if (key.rfind(prefix, 0) != 0 || key.size() <= prefix.size() + suffix.size() ||
        key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    set_parameter(alg, key.substr(prefix.size(), key.size() - prefix.size() - suffix.size()), parse_double(value));
  }
}

TrainedModel load_stage_model(const GlobalOptions& opts, const std::optional<fs::path>& model) {
  const fs::path path = model ? *model : opts.out / files::model;
  if (!fs::exists(path)) throw InputError(path.string() + " not found; run 'train' first");
  return load_model(path);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void remove_bundle(const GlobalOptions& opts) {
  for (const char* name : {files::series, files::split, files::loadings, files::sn_table, files::model, files::trace,
                           files::metrics, files::uq, files::band, files::bundle, files::log}) {
    fs::remove(opts.out / name);
  }
}

}  // namespace

void cmd_synth(const GlobalOptions& opts, const std::optional<fs::path>& file) {
  stage(opts, "synth", [&] {
    const ExperimentConfig cfg = stage_config(opts);
    cfg.synth.validate();
    // --seed selects the noise stream; otherwise synth.seed does.
    const std::uint64_t seed = opts.seed ? *opts.seed : cfg.synth.seed;
    write_series_file(file ? *file : opts.out / files::series, synthesize(cfg.synth, seed));
  });
}

void cmd_prepare(const GlobalOptions& opts, const std::optional<fs::path>& data) {
  stage(opts, "prepare", [&] {
    ExperimentConfig cfg = stage_config(opts);
    if (data) cfg.data_path = data->string();
    const TimeSeries series = cfg.data_path.empty() ? synthesize(cfg.synth, cfg.synth.seed) : read_series(cfg.data_path);
    const LaggedDataset full = build_lagged(series, lag_range(cfg.max_lag));
    const SplitIndices split = random_split(full.rows(), cfg.test_fraction, stage_seed(cfg, Stream::Split));

    KeyValues resolved = cfg.to_kv();
    write_text(opts.out / files::config,
               "# Resolved experiment configuration; every stage reads this file\n" + resolved.serialize());
    write_series_file(opts.out / files::series, series);
    write_text(opts.out / files::split, split_report(split, full, cfg.hash()));
  });
}

void cmd_select(const GlobalOptions& opts) {
  stage(opts, "select", [&] {
    const ExperimentConfig cfg = stage_config(opts);
    const Prepared p = load_prepared(opts, cfg);
    const LoadingTable table = cfg.pca_loadings_file.empty()
                                   ? loadings_from_data(p.train.X, p.full.lags)
                                   : parse_loading_table(KeyValues::read(cfg.pca_loadings_file));
    const SelectionOutcome outcome = choose_lags(table, cfg);
    std::string report = loading_report(table, outcome, cfg);
    report += "config_hash = " + hex64(cfg.hash()) + "\n";
    write_text(opts.out / files::loadings, report);
  });
}

void cmd_tune(const GlobalOptions& opts) {
  stage(opts, "tune", [&] {
    const ExperimentConfig cfg = stage_config(opts);
    if (cfg.is_classical()) throw InputError("tuning needs a metaheuristic optimizer, not 'classical'");
    const Prepared p = load_prepared(opts, cfg);
    const std::vector<int> lags = selected_lags(opts, cfg);
    const LaggedDataset train = p.train.select_columns(lags);
    const ScalingParams scaler = fit_scaler(train.X, train.y);
    const Matrix Xs = transform(train.X, scaler, Direction::Forward);
    const Vector ys = transform_target(train.y, scaler, Direction::Forward);
    const ModelSpec spec = cfg.model_spec(static_cast<int>(lags.size()));

    const TrialPlan plan = build_plan(cfg.factor_levels(), cfg.tune_mode);
    const std::uint64_t seed = stage_seed(cfg, Stream::Tune);
    std::uint64_t run_index = 0;
    const auto costs = run_plan(plan, cfg.tune_repeats, [&](const std::vector<double>& values, int) {
      AlgorithmConfig alg = cfg.algorithm_config();
      for (std::size_t f = 0; f < plan.factors.size(); ++f) set_parameter(alg, plan.factors[f].name, values[f]);
      set_iterations(alg, cfg.tune_iterations);
      return train_hybrid(spec, alg, Xs, ys, derive_seed(seed, run_index++)).training_cost;
    });
    const SnTable table = best_levels(plan, costs, cfg.tune_repeats);
    std::string report = sn_report(plan, costs, table, cfg.tune_repeats, cfg.tune_iterations);
    report += "algorithm = " + algorithm_name(cfg.algorithm_config()) + "\n";
    report += "config_hash = " + hex64(cfg.hash()) + "\n";
    write_text(opts.out / files::sn_table, report);
  });
}

Status cmd_train(const GlobalOptions& opts, const std::optional<std::string>& family,
                 const std::optional<std::string>& optimizer) {
  return stage(opts, "train", [&] {
    const ExperimentConfig base = stage_config(opts);
    const Prepared p = load_prepared(opts, base);
    const std::vector<int> lags = selected_lags(opts, base);
    ExperimentConfig cfg = base;
    if (family) cfg.family = parse_family(*family);
    if (optimizer && *optimizer != base.optimizer) {
      // The resolved overrides belong to the configured algorithm; --opt runs the other one at its defaults.
      cfg.optimizer = *optimizer;
      cfg.optimizer_overrides.clear();
    }

    const LaggedDataset train = p.train.select_columns(lags);
    const ScalingParams scaler = fit_scaler(train.X, train.y);
    const Matrix Xs = transform(train.X, scaler, Direction::Forward);
    const Vector ys = transform_target(train.y, scaler, Direction::Forward);
    const ModelSpec spec = cfg.model_spec(static_cast<int>(lags.size()));
    const std::uint64_t seed = stage_seed(base, Stream::Train);

    TrainedModel model;
    if (cfg.is_classical()) {
      model = train_classical(spec, Xs, ys, seed, cfg.classical);
    } else {
      AlgorithmConfig alg = cfg.algorithm_config();
      apply_tuning(opts, base, alg);
      model = train_hybrid(spec, alg, Xs, ys, seed);
    }
    model.scaler = scaler;
    model.lags = lags;
    save_model(opts.out / files::model, model);
    if (opts.trace) write_text(opts.out / files::trace, trace_report(model.training.trace));
    if (spec.family == ModelFamily::Svr && !model.svr.converged) {
      std::cerr << "gwl: train: SVR solver hit its iteration limit before meeting the KKT tolerance\n";
      return Status::NotConverged;
    }
    return Status::Ok;
  });
}

void cmd_eval(const GlobalOptions& opts, const std::optional<fs::path>& model_path) {
  stage(opts, "eval", [&] {
    const ExperimentConfig cfg = stage_config(opts);
    const Prepared p = load_prepared(opts, cfg);
    const TrainedModel model = load_stage_model(opts, model_path);
    const LaggedDataset train = p.train.select_columns(model.lags);
    const LaggedDataset test = p.test.select_columns(model.lags);
    write_text(opts.out / files::metrics,
               metrics_report(model, evaluate(model, train), train.rows(), evaluate(model, test), test.rows()));
  });
}

void cmd_uq(const GlobalOptions& opts, const std::vector<fs::path>& model_paths, const std::optional<std::string>& band) {
  stage(opts, "uq", [&] {
    const ExperimentConfig cfg = stage_config(opts);
    const Prepared p = load_prepared(opts, cfg);
    std::vector<TrainedModel> models;
    if (model_paths.empty()) {
      models.push_back(load_stage_model(opts, std::nullopt));
    } else {
      for (const fs::path& path : model_paths) models.push_back(load_stage_model(opts, path));
    }
    for (const TrainedModel& m : models) {
      if (m.lags != models.front().lags) throw InputError("uq: all models must use the same lags");
    }
    const LaggedDataset train = p.train.select_columns(models.front().lags);
    const LaggedDataset test = p.test.select_columns(models.front().lags);
    const std::uint64_t seed = stage_seed(cfg, Stream::Uq);

    UqSummary s;
    s.mode = band ? parse_band_mode(*band) : cfg.uq_band;
    s.level = cfg.uq_level;
    s.error = cfg.uq_error;
    if (cfg.uq_calibrate) {
      const TrainedModel& lead = models.front();
      const Predictor predict = [&lead](std::span<const double> x) { return lead.predict(x); };
      const CalibrationResult cal =
          calibrate_input_error(predict, train.X, train.y, cfg.uq_bounds, cfg.uq_budget, derive_seed(seed, 1));
      s.error = cal.error;
      s.calibrated = true;
      s.calibration_loglik = cal.log_likelihood;
    }
    const Ensemble fit_ens = mc_ensemble(models, train.X, cfg.uq_draws, s.error, derive_seed(seed, 2));
    const std::vector<double> y_train(train.y.data(), train.y.data() + train.y.size());
    s.bma = bma_fit(fit_ens, y_train);

    const Ensemble test_ens = mc_ensemble(models, test.X, cfg.uq_draws, s.error, derive_seed(seed, 3));
    const Band b = s.mode == BandMode::Bma ? interval_bounds(test_ens, s.bma.weights, s.bma.sigmas, s.level)
                                           : quantile_bounds(test_ens, s.level);
    const std::vector<double> y_test(test.y.data(), test.y.data() + test.y.size());
    s.p = p_factor(y_test, b);
    s.d = d_factor(y_test, b);
    s.members = static_cast<int>(test_ens.members.cols());
    write_text(opts.out / files::uq, uq_report(s));
    write_text(opts.out / files::band, band_csv(test.target_months, y_test, b));
  });
}

Status cmd_pipeline(const GlobalOptions& opts) {
  fs::create_directories(opts.out);
  remove_bundle(opts);
  cmd_prepare(opts, std::nullopt);
  // Later stages read the resolved config written by prepare.
  GlobalOptions next = opts;
  next.config.reset();
  next.seed.reset();
  next.trace = true;
  const ExperimentConfig cfg = stage_config(next);
  cmd_select(next);
  if (cfg.tune) cmd_tune(next);
  const Status status = cmd_train(next, std::nullopt, std::nullopt);
  cmd_eval(next, std::nullopt);
  if (cfg.uq) cmd_uq(next, {}, std::nullopt);

  stage(next, "bundle", [&] {
    KeyValues kv;
    kv.set("version", kVersion);
    kv.set("config_hash", hex64(cfg.hash()));
    kv.set("seed", std::to_string(cfg.seed));
    kv.set("seed.split", std::to_string(stage_seed(cfg, Stream::Split)));
    kv.set("seed.train", std::to_string(stage_seed(cfg, Stream::Train)));
    kv.set("seed.tune", std::to_string(stage_seed(cfg, Stream::Tune)));
    kv.set("seed.uq", std::to_string(stage_seed(cfg, Stream::Uq)));
    std::string sections;
    for (const char* name : {files::config, files::series, files::split, files::loadings, files::sn_table,
                             files::model, files::trace, files::metrics, files::uq, files::band}) {
      const fs::path path = next.out / name;
      if (!fs::exists(path)) continue;
      sections += (sections.empty() ? "" : ",") + std::string(name);
      kv.set(std::string("fnv.") + name, hex64(fnv1a64(read_text(path))));
    }
    kv.set("sections", sections);
    kv.set("status", status == Status::Ok ? "ok" : "not-converged");
    write_text(next.out / files::bundle, "# Report bundle provenance; timestamps live in run.log only\n" + kv.serialize());
  });
  return status;
}

std::vector<CompareRow> cmd_compare(const GlobalOptions& opts, const std::vector<fs::path>& configs,
                                    const std::vector<std::uint64_t>& seeds) {
  if (configs.size() < 2) throw InputError("compare: needs at least two configs");
  if (seeds.empty()) throw InputError("compare: needs at least one seed");
  const std::size_t nc = configs.size(), ns = seeds.size();
  std::vector<std::vector<MetricsReport>> test(nc, std::vector<MetricsReport>(ns));
  std::vector<std::string> labels(nc);
  std::vector<std::string> data_hash(ns);

  for (std::size_t c = 0; c < nc; ++c) {
    labels[c] = std::to_string(c) + ":" + configs[c].stem().string();
    for (std::size_t s = 0; s < ns; ++s) {
      GlobalOptions run = opts;
      run.config = configs[c];
      run.seed = seeds[s];
      run.out = opts.out / ("cfg" + std::to_string(c)) / ("seed" + std::to_string(seeds[s]));
      fs::create_directories(run.out);
      remove_bundle(run);
      cmd_prepare(run, std::nullopt);
      const std::string h = hex64(fnv1a64(read_text(run.out / files::series)));
      if (c == 0) {
        data_hash[s] = h;
      } else if (h != data_hash[s]) {
        throw InputError("compare: config '" + configs[c].string() + "' uses different data than '" +
                         configs[0].string() + "'");
      }
      GlobalOptions next = run;
      next.config.reset();
      next.seed.reset();
      const ExperimentConfig cfg = stage_config(next);
      cmd_select(next);
      if (cfg.tune) cmd_tune(next);
      cmd_train(next, std::nullopt, std::nullopt);
      cmd_eval(next, std::nullopt);
      const KeyValues m = KeyValues::read(next.out / files::metrics);
      auto field = [&](const char* key) { return parse_double(m.get(key)); };
      test[c][s] = {field("test.rmse"), field("test.mae"), field("test.nse"), field("test.pbias"), field("test.r2")};
    }
  }

  auto improvement = [](double base, double value) { return base > 0.0 ? 100.0 * (base - value) / base : 0.0; };
  std::vector<CompareRow> rows;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t s = 0; s < ns; ++s) {
      rows.push_back({labels[c], std::to_string(seeds[s]), test[c][s], improvement(test[0][s].rmse, test[c][s].rmse)});
    }
  }
  auto med = [&](std::size_t c, double MetricsReport::*field) {
    std::vector<double> v;
    for (const MetricsReport& m : test[c]) v.push_back(m.*field);
    return median(v);
  };
  for (std::size_t c = 0; c < nc; ++c) {
    const MetricsReport m{med(c, &MetricsReport::rmse), med(c, &MetricsReport::mae), med(c, &MetricsReport::nse),
                          med(c, &MetricsReport::pbias), med(c, &MetricsReport::r2)};
    rows.push_back({labels[c], "median", m, improvement(med(0, &MetricsReport::rmse), m.rmse)});
  }
  write_text(opts.out / "compare.txt", compare_report(rows));
  return rows;
}

int guarded(const std::function<Status()>& body) {
  try {
    return body() == Status::Ok ? 0 : 3;
  } catch (const InputError& e) {
    std::cerr << "gwl: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gwl: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gwl::cli
