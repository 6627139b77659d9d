#include "gwl/model_file.hpp"

#include <fstream>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/format.hpp"
#include "gwl/kv.hpp"

namespace gwl {

namespace {

std::string join_ints(std::span<const int> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string range_pairs(const std::vector<ColumnRange>& ranges) {
  std::vector<double> flat;
  for (const ColumnRange& r : ranges) flat.insert(flat.end(), {r.min, r.max});
  return join_doubles(flat);
}

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model) {
  KeyValues kv;
  kv.set("format", "gwl-model 1");
  kv.set("family", family_name(model.spec.family));
  kv.set("anfis.inputs", std::to_string(model.spec.anfis.n_inputs));
  kv.set("anfis.mfs", std::to_string(model.spec.anfis.mfs_per_input));
  kv.set("mlp.widths", join_ints(model.spec.mlp.widths));
  kv.set("svr.inputs", std::to_string(model.spec.svr_inputs));
  kv.set("lags", join_ints(model.lags));
  kv.set("scaler.features", range_pairs(model.scaler.features));
  kv.set("scaler.target", range_pairs({model.scaler.target}));
  kv.set("params", join_doubles(model.params));
  kv.set("algorithm", model.algorithm);
  kv.set("seed", std::to_string(model.seed));
  kv.set("config", model.config);
  kv.set("training_cost", model.training_cost);
  kv.set("evaluations", std::to_string(model.training.evaluations));
  if (model.spec.family == ModelFamily::Svr) {
    const SvrModel& s = model.svr;
    kv.set("svr.C", s.hyper.C);
    kv.set("svr.gamma", s.hyper.gamma);
    kv.set("svr.epsilon", s.hyper.epsilon);
    kv.set("svr.bias", s.bias);
    kv.set("svr.converged", s.converged ? "true" : "false");
    kv.set("svr.iterations", std::to_string(s.iterations));
    kv.set("svr.coefficients", join_doubles(s.coefficients));
    std::vector<int> idx(s.support_index.begin(), s.support_index.end());
    kv.set("svr.support_index", join_ints(idx));
    std::vector<double> sv(s.support_vectors.data(), s.support_vectors.data() + s.support_vectors.size());
    kv.set("svr.support_vectors", join_doubles(sv));
  }
  out << "# groundwater-level surrogate model; lengths in meters, params in scaled units\n" << kv.serialize();
}

TrainedModel parse_model(std::istream& in, const std::string& source) {
  const KeyValues kv = KeyValues::parse(in, source);
  if (kv.get("format", "") != "gwl-model 1") throw InputError(source + ": not a gwl-model 1 file");
  TrainedModel m;
  m.spec.family = parse_family(kv.get("family"));
  m.spec.anfis.n_inputs = kv.get_int("anfis.inputs", 5);
  m.spec.anfis.mfs_per_input = kv.get_int("anfis.mfs", 2);
  m.spec.mlp.widths = kv.get_ints("mlp.widths", {5, 10, 1});
  m.spec.svr_inputs = kv.get_int("svr.inputs", 5);
  m.spec.validate();
  m.lags = kv.get_ints("lags");
  const std::vector<double> feats = kv.get_doubles("scaler.features");
  const std::vector<double> target = kv.get_doubles("scaler.target");
  if (feats.size() != 2 * m.lags.size() || target.size() != 2) throw InputError(source + ": malformed scaler");
  for (std::size_t i = 0; i < m.lags.size(); ++i) m.scaler.features.push_back({feats[2 * i], feats[2 * i + 1]});
  m.scaler.target = {target[0], target[1]};
  if (static_cast<int>(m.lags.size()) != m.spec.n_inputs()) throw InputError(source + ": lag count does not match the model inputs");
  m.params = kv.get_doubles("params");
  if (static_cast<int>(m.params.size()) != param_layout(m.spec).dimension) {
    throw InputError(source + ": parameter vector has the wrong length");
  }
  m.algorithm = kv.get("algorithm", "");
  m.seed = kv.get_u64("seed", 0);
  m.config = kv.get("config", "");
  m.training_cost = kv.get_double("training_cost", 0.0);
  m.training.evaluations = kv.get_int("evaluations", 0);
  m.training.best = m.params;
  m.training.best_cost = m.training_cost;
  m.training.algorithm = m.algorithm;
  m.training.seed = m.seed;
  if (m.spec.family == ModelFamily::Svr) {
    SvrModel& s = m.svr;
    s.hyper = {kv.get_double("svr.C", 1.0), kv.get_double("svr.gamma", 1.0), kv.get_double("svr.epsilon", 0.1)};
    s.bias = kv.get_double("svr.bias", 0.0);
    s.converged = kv.get_bool("svr.converged", true);
    s.iterations = kv.get_int("svr.iterations", 0);
    s.coefficients = kv.get_doubles("svr.coefficients");
    for (int i : kv.get_ints("svr.support_index")) s.support_index.push_back(static_cast<std::size_t>(i));
    const std::vector<double> sv = kv.get_doubles("svr.support_vectors");
    const std::size_t nsv = s.coefficients.size();
    const auto width = static_cast<std::size_t>(m.spec.svr_inputs);
    if (sv.size() != nsv * width || s.support_index.size() != nsv) throw InputError(source + ": malformed SVR block");
    s.support_vectors.resize(static_cast<Eigen::Index>(nsv), static_cast<Eigen::Index>(width));
    std::copy(sv.begin(), sv.end(), s.support_vectors.data());
  }
  return m;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_model(out, model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path.string());
  return parse_model(in, path.string());
}

}  // namespace gwl
