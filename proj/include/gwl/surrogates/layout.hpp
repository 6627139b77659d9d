#pragma once

#include <span>
#include <string>
#include <vector>

#include "gwl/surrogates/anfis.hpp"
#include "gwl/surrogates/mlp.hpp"
#include "gwl/surrogates/svr.hpp"

namespace gwl {

enum class ModelFamily { Anfis, Mlp, Svr };

std::string family_name(ModelFamily f);
/// Accepts "anfis", "ann"/"mlp", "svr".
ModelFamily parse_family(const std::string& name);

struct ModelSpec {
  ModelFamily family = ModelFamily::Anfis;
  AnfisSpec anfis;
  MlpSpec mlp;
  int svr_inputs = 5;

  int n_inputs() const;
  /// Rewires every family's input width.
  void set_inputs(int n);
  void validate() const;
};

using ParamVector = std::vector<double>;

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  void validate() const;
  /// Clamps v into the box in place.
  void clamp(std::span<double> v) const;
  bool contains(std::span<const double> v) const;
};

struct ParamLayout {
  int dimension = 0;
  Bounds bounds;
};

/// Search-space layout used by the metaheuristic trainers. ANFIS vectors
/// hold (a, b, c) per membership function followed by the consequent rows;
/// MLP vectors hold each layer's weights row by row and then its biases;
/// SVR vectors hold (log10 C, log10 gamma, epsilon).
ParamLayout param_layout(const ModelSpec& spec);

ParamVector encode_anfis(const AnfisSpec& spec, const AnfisParams& params);
AnfisParams decode_anfis(const AnfisSpec& spec, std::span<const double> v);

ParamVector encode_mlp(const MlpSpec& spec, const MlpParams& params);
MlpParams decode_mlp(const MlpSpec& spec, std::span<const double> v);

ParamVector encode_svr(const SvrHyper& hyper);
SvrHyper decode_svr(std::span<const double> v);

}  // namespace gwl
