#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace fs = std::filesystem;
using gwl::cli::GlobalOptions;
using gwl::cli::Status;

int main(int argc, char** argv) {
  CLI::App app{"Groundwater-level forecasting with metaheuristic-trained surrogates"};
  app.set_version_flag("--version", gwl::cli::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  std::uint64_t seed = 0;
  std::string config;
  app.add_option("--seed", seed, "Run seed");
  app.add_option("--out", opts.out, "Output directory")->capture_default_str();
  app.add_option("--config", config, "Config file (key = value lines)");
  app.add_flag("--trace", opts.trace, "Write the optimizer convergence trace");

  auto* synth = app.add_subcommand("synth", "Write a synthetic monthly series");
  std::string synth_file;
  synth->add_option("--file", synth_file, "Series CSV path (default <out>/series.csv)");

  auto* prepare = app.add_subcommand("prepare", "Resolve the config, load or synthesize data, split rows");
  std::string data;
  prepare->add_option("--data", data, "Series CSV (month,level)");

  app.add_subcommand("select", "PCA loadings and lag selection");
  app.add_subcommand("tune", "Taguchi tuning of the optimizer");

  auto* train = app.add_subcommand("train", "Fit the surrogate");
  std::string family, optimizer;
  train->add_option("--model", family, "anfis, ann or svr");
  train->add_option("--opt", optimizer, "goa, pso, ga, wa, cso, kha or classical");

  auto* eval = app.add_subcommand("eval", "Score a model on both splits");
  std::string eval_model;
  eval->add_option("--model", eval_model, "Model file (default <out>/model.txt)");

  auto* uq = app.add_subcommand("uq", "Input-error calibration, ensemble and band");
  std::vector<std::string> uq_models;
  std::string band;
  uq->add_option("--model", uq_models, "Model file; repeat for a multi-model ensemble");
  uq->add_option("--band", band, "bma or quantile");

  app.add_subcommand("pipeline", "Run every stage and write the report bundle");

  auto* compare = app.add_subcommand("compare", "Compare configs over paired seeds");
  std::vector<std::string> configs;
  std::vector<std::uint64_t> seeds;
  compare->add_option("--configs", configs, "Two or more config files")->required();
  compare->add_option("--seeds", seeds, "Seeds")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (app.count("--seed")) opts.seed = seed;
  if (!config.empty()) opts.config = fs::path(config);

  auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
  auto opt_str = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  return gwl::cli::guarded([&]() -> Status {
    if (name == "synth") {
      gwl::cli::cmd_synth(opts, opt_path(synth_file));
    } else if (name == "prepare") {
      gwl::cli::cmd_prepare(opts, opt_path(data));
    } else if (name == "select") {
      gwl::cli::cmd_select(opts);
    } else if (name == "tune") {
      gwl::cli::cmd_tune(opts);
    } else if (name == "train") {
      return gwl::cli::cmd_train(opts, opt_str(family), opt_str(optimizer));
    } else if (name == "eval") {
      gwl::cli::cmd_eval(opts, opt_path(eval_model));
    } else if (name == "uq") {
      gwl::cli::cmd_uq(opts, {uq_models.begin(), uq_models.end()}, opt_str(band));
    } else if (name == "pipeline") {
      const Status status = gwl::cli::cmd_pipeline(opts);
      std::cout << "bundle written to " << opts.out.string() << '\n';
      return status;
    } else if (name == "compare") {
      gwl::cli::cmd_compare(opts, {configs.begin(), configs.end()}, seeds);
      std::cout << "comparison written to " << (opts.out / "compare.txt").string() << '\n';
    }
    return Status::Ok;
  });
}
