#include "gwl/surrogates/layout.hpp"

#include <algorithm>
#include <cmath>

#include "gwl/error.hpp"

namespace gwl {

std::string family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::Anfis: return "anfis";
    case ModelFamily::Mlp: return "ann";
    case ModelFamily::Svr: return "svr";
  }
  return "unknown";
}

ModelFamily parse_family(const std::string& name) {
  if (name == "anfis") return ModelFamily::Anfis;
  if (name == "ann" || name == "mlp") return ModelFamily::Mlp;
  if (name == "svr" || name == "svm") return ModelFamily::Svr;
  throw InputError("unknown model family '" + name + "' (expected anfis, ann or svr)");
}

int ModelSpec::n_inputs() const {
  switch (family) {
    case ModelFamily::Anfis: return anfis.n_inputs;
    case ModelFamily::Mlp: return mlp.n_inputs();
    case ModelFamily::Svr: return svr_inputs;
  }
  return 0;
}

void ModelSpec::set_inputs(int n) {
  anfis.n_inputs = n;
  if (!mlp.widths.empty()) mlp.widths.front() = n;
  svr_inputs = n;
}

void ModelSpec::validate() const {
  switch (family) {
    case ModelFamily::Anfis: anfis.validate(); break;
    case ModelFamily::Mlp: mlp.validate(); break;
    case ModelFamily::Svr:
      if (svr_inputs < 1) throw InputError("SVR: need at least one input");
      break;
  }
}

void Bounds::validate() const {
  if (lower.size() != upper.size()) throw InputError("bounds: lower and upper differ in length");
  if (lower.empty()) throw InputError("bounds: empty");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      throw InputError("bounds: coordinate " + std::to_string(i) + " needs finite lower < upper");
    }
  }
}

void Bounds::clamp(std::span<double> v) const {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) v[i] = lower[i];
    v[i] = std::clamp(v[i], lower[i], upper[i]);
  }
}

bool Bounds::contains(std::span<const double> v) const {
  if (v.size() != lower.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= lower[i] && v[i] <= upper[i])) return false;
  }
  return true;
}

namespace {

void push_box(Bounds& b, std::size_t count, double lo, double hi) {
  b.lower.insert(b.lower.end(), count, lo);
  b.upper.insert(b.upper.end(), count, hi);
}

void check_length(std::span<const double> v, int expected, const char* what) {
  if (static_cast<int>(v.size()) != expected) {
    throw InputError(std::string(what) + ": vector length " + std::to_string(v.size()) + ", expected " +
                     std::to_string(expected));
  }
}

}  // namespace

ParamLayout param_layout(const ModelSpec& spec) {
  spec.validate();
  ParamLayout layout;
  Bounds& b = layout.bounds;
  switch (spec.family) {
    case ModelFamily::Anfis:
      for (int m = 0; m < spec.anfis.premise_count(); ++m) {
        b.lower.insert(b.lower.end(), {0.01, 0.5, -0.5});
        b.upper.insert(b.upper.end(), {2.0, 5.0, 1.5});
      }
      push_box(b, static_cast<std::size_t>(spec.anfis.consequent_count()), -10.0, 10.0);
      layout.dimension = spec.anfis.dimension();
      break;
    case ModelFamily::Mlp:
      layout.dimension = spec.mlp.dimension();
      push_box(b, static_cast<std::size_t>(layout.dimension), -5.0, 5.0);
      break;
    case ModelFamily::Svr:
      b.lower = {-2.0, -3.0, 0.001};
      b.upper = {3.0, 2.0, 0.5};
      layout.dimension = 3;
      break;
  }
  return layout;
}

ParamVector encode_anfis(const AnfisSpec& spec, const AnfisParams& params) {
  if (!params.matches(spec)) throw InputError("encode_anfis: parameters do not match the spec");
  ParamVector v;
  v.reserve(static_cast<std::size_t>(spec.dimension()));
  for (const BellParams& p : params.premise) v.insert(v.end(), {p.a, p.b, p.c});
  for (Eigen::Index r = 0; r < params.consequent.rows(); ++r) {
    for (Eigen::Index j = 0; j < params.consequent.cols(); ++j) v.push_back(params.consequent(r, j));
  }
  return v;
}

AnfisParams decode_anfis(const AnfisSpec& spec, std::span<const double> v) {
  check_length(v, spec.dimension(), "decode_anfis");
  AnfisParams params;
  std::size_t k = 0;
  params.premise.resize(static_cast<std::size_t>(spec.premise_count()));
  for (BellParams& p : params.premise) {
    p.a = v[k++];
    p.b = v[k++];
    p.c = v[k++];
  }
  params.consequent.resize(spec.rules(), spec.n_inputs + 1);
  for (Eigen::Index r = 0; r < params.consequent.rows(); ++r) {
    for (Eigen::Index j = 0; j < params.consequent.cols(); ++j) params.consequent(r, j) = v[k++];
  }
  return params;
}

ParamVector encode_mlp(const MlpSpec& spec, const MlpParams& params) {
  if (!params.matches(spec)) throw InputError("encode_mlp: parameters do not match the spec");
  ParamVector v;
  v.reserve(static_cast<std::size_t>(spec.dimension()));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    const Matrix& W = params.weights[l];
    v.insert(v.end(), W.data(), W.data() + W.size());
    const Vector& bias = params.biases[l];
    v.insert(v.end(), bias.data(), bias.data() + bias.size());
  }
  return v;
}

MlpParams decode_mlp(const MlpSpec& spec, std::span<const double> v) {
  spec.validate();
  check_length(v, spec.dimension(), "decode_mlp");
  MlpParams params;
  std::size_t k = 0;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    Matrix W(spec.widths[l + 1], spec.widths[l]);
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(k), W.size(), W.data());
    k += static_cast<std::size_t>(W.size());
    Vector bias(spec.widths[l + 1]);
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(k), bias.size(), bias.data());
    k += static_cast<std::size_t>(bias.size());
    params.weights.push_back(std::move(W));
    params.biases.push_back(std::move(bias));
  }
  return params;
}

ParamVector encode_svr(const SvrHyper& hyper) {
  hyper.validate();
  return {std::log10(hyper.C), std::log10(hyper.gamma), hyper.epsilon};
}

SvrHyper decode_svr(std::span<const double> v) {
  check_length(v, 3, "decode_svr");
  return {std::pow(10.0, v[0]), std::pow(10.0, v[1]), v[2]};
}

}  // namespace gwl
