#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "experiment.hpp"
#include "gwl/error.hpp"
#include "gwl/format.hpp"
#include "gwl/kv.hpp"
#include "support.hpp"

using namespace gwl;
using namespace gwl::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gwl_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& extra, int max_lag = 6) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << "# small run\n"
         "synth.length = 80\n"
         "lags.max = " << max_lag << "\n"
         "optimizer.population = 12\n"
         "optimizer.iterations = 15\n"
         "uq.draws = 4\n"
         "uq.budget = 5\n"
      << extra;
  return p;
}

GlobalOptions options(const fs::path& out, const std::optional<fs::path>& config) {
  GlobalOptions o;
  o.out = out;
  o.config = config;
  return o;
}

}  // namespace

TEST_CASE("synth writes a constant series without noise or seasonality") {
  const fs::path dir = scratch("flat");
  const fs::path cfg = write_config(dir, "flat.txt", "synth.noise = 0\nsynth.amplitude = 0\nsynth.phi1 = 0\nsynth.phi2 = 0\n");
  cmd_synth(options(dir, cfg), dir / "flat.csv");
  const TimeSeries s = read_series(dir / "flat.csv");
  REQUIRE(s.size() == 80);
  for (double v : s.levels) CHECK(v == 20.0);
}

TEST_CASE("synthetic series is seeded and autocorrelated") {
  SynthSpec spec;
  const TimeSeries a = synthesize(spec, 5), b = synthesize(spec, 5), c = synthesize(spec, 6);
  CHECK(a.levels == b.levels);
  CHECK(a.levels != c.levels);
  CHECK(a.size() == 140);

  double mean = 0.0;
  for (double v : a.levels) mean += v;
  mean /= static_cast<double>(a.size());
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    den += (a.levels[t] - mean) * (a.levels[t] - mean);
    if (t > 0) num += (a.levels[t] - mean) * (a.levels[t - 1] - mean);
  }
  CHECK(num / den > 0.6);

  spec.phi1 = 0.9;
  spec.phi2 = 0.3;
  CHECK_THROWS_AS(synthesize(spec, 1), InputError);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return ExperimentConfig::from_kv(KeyValues::parse(in));
  };
  CHECK(parse("").optimizer == "goa");
  CHECK_THROWS_AS(parse("lags.maximum = 3\n"), InputError);
  CHECK_THROWS_AS(parse("split.test_fraction = 1.5\n"), InputError);
  CHECK_THROWS_AS(parse("uq.draws = 1\n"), InputError);
  CHECK_THROWS_AS(parse("model.family = tree\n"), InputError);

  const ExperimentConfig c = parse("seed = 9\nmodel.family = mlp\n");
  const ExperimentConfig back = ExperimentConfig::from_kv(c.to_kv());
  CHECK(back.hash() == c.hash());
  CHECK(back.seed == 9u);
  CHECK(parse("seed = 10\n").hash() != parse("seed = 9\n").hash());
}

TEST_CASE("pipeline writes every section and is reproducible") {
  const fs::path dir = scratch("pipeline");
  const fs::path cfg = write_config(dir, "run.txt", "");
  const fs::path a = dir / "a", b = dir / "b";
  REQUIRE(cmd_pipeline(options(a, cfg)) == Status::Ok);
  REQUIRE(cmd_pipeline(options(b, cfg)) == Status::Ok);

  const KeyValues bundle = KeyValues::read(a / files::bundle);
  CHECK(bundle.get("sections") ==
        "config.txt,series.csv,split.txt,loadings.txt,model.txt,trace.txt,metrics.txt,uq.txt,uq_band.csv");
  CHECK(bundle.get("status") == "ok");
  for (const char* name : {files::config, files::series, files::split, files::loadings, files::model, files::trace,
                           files::metrics, files::uq, files::band, files::bundle}) {
    CAPTURE(std::string(name));
    CHECK(slurp(a / name) == slurp(b / name));
  }

  const KeyValues metrics = KeyValues::read(a / files::metrics);
  CHECK(std::isfinite(parse_double(metrics.get("test.nse"))));
  CHECK(parse_double(metrics.get("train.rmse")) >= 0.0);
  const KeyValues uq = KeyValues::read(a / files::uq);
  const double p = parse_double(uq.get("p_factor"));
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  CHECK(parse_double(uq.get("d_factor")) >= 0.0);

  // A different seed changes the outcome.
  GlobalOptions other = options(dir / "c", cfg);
  other.seed = 2;
  cmd_pipeline(other);
  CHECK(slurp(dir / "c" / files::model) != slurp(a / files::model));
}

TEST_CASE("standalone stages reject stale or missing artifacts") {
  const fs::path dir = scratch("stages");
  const fs::path cfg = write_config(dir, "run.txt", "uq.enabled = false\n");
  const GlobalOptions o = options(dir, cfg);
  CHECK_THROWS_AS(cmd_select(options(dir, std::nullopt)), InputError);
  cmd_prepare(o, std::nullopt);
  const GlobalOptions next = options(dir, std::nullopt);
  cmd_select(next);
  CHECK(cmd_train(next, std::string("mlp"), std::string("pso")) == Status::Ok);
  cmd_eval(next, std::nullopt);
  CHECK(KeyValues::read(dir / files::metrics).get("model") == "ann-pso");

  // Re-preparing under another seed invalidates the loadings.
  GlobalOptions reseeded = o;
  reseeded.seed = 7;
  cmd_prepare(reseeded, std::nullopt);
  CHECK_THROWS_AS(cmd_train(next, std::nullopt, std::nullopt), InputError);
}

TEST_CASE("precomputed loading table drives lag selection") {
  const fs::path dir = scratch("loadings");
  const fs::path cfg = write_config(dir, "run.txt",
                                    "pca.loadings_file = " +
                                        test::fixture("reference_loadings.txt").string() + "\n",
                                    12);
  const GlobalOptions o = options(dir, cfg);
  cmd_prepare(o, std::nullopt);
  cmd_select(options(dir, std::nullopt));
  const KeyValues l = KeyValues::read(dir / files::loadings);
  CHECK(l.get("selected") == "1,2,3,4,5");
  CHECK(l.get("components_kept") == "4");
  CHECK(l.get("selection") == "threshold");
}

TEST_CASE("guarded maps failures to exit codes") {
  CHECK(guarded([] { return Status::Ok; }) == 0);
  CHECK(guarded([] { return Status::NotConverged; }) == 3);
  CHECK(guarded([]() -> Status { throw InputError("bad"); }) == 2);
  CHECK(guarded([]() -> Status { throw NumericError("nan"); }) == 1);
  const fs::path dir = scratch("missing");
  CHECK(guarded([&] {
          cmd_prepare(options(dir, std::nullopt), dir / "absent.csv");
          return Status::Ok;
        }) == 2);
}

TEST_CASE("compare of a config against itself reports zero improvement") {
  const fs::path dir = scratch("compare");
  const fs::path cfg = write_config(dir, "same.txt", "uq.enabled = false\n");
  const std::vector<CompareRow> rows = cmd_compare(options(dir, std::nullopt), {cfg, cfg}, {1, 2});
  REQUIRE(rows.size() == 2 * 2 + 2);
  for (const CompareRow& r : rows) CHECK(r.improvement == 0.0);
  CHECK(rows[0].test.rmse == rows[2].test.rmse);
  CHECK(fs::exists(dir / "compare.txt"));

  const fs::path other = write_config(dir, "other.txt", "uq.enabled = false\nsynth.noise = 0.5\n");
  CHECK_THROWS_AS(cmd_compare(options(dir, std::nullopt), {cfg, other}, {1}), InputError);
  CHECK_THROWS_AS(cmd_compare(options(dir, std::nullopt), {cfg}, {1}), InputError);
}
