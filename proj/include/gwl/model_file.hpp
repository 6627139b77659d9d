#pragma once

#include <filesystem>
#include <iosfwd>

#include "gwl/trainer.hpp"

namespace gwl {

// Text model format: one `key = value` per line, keys sorted.
//   format            gwl-model 1
//   family            anfis | ann | svr
//   anfis.inputs, anfis.mfs, mlp.widths, svr.inputs
//   lags              selected lag months
//   scaler.features   min max pairs, one pair per lag, in meters
//   scaler.target     min max of the target, in meters
//   params            flat parameter vector
//   svr.*             fitted duals, bias and support vectors (SVR only)
//   algorithm, seed, config, training_cost, evaluations
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel parse_model(std::istream& in, const std::string& source = "<model>");

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace gwl
