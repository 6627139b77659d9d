#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gwl {

// Row-major so that a sample row can be handed out as a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace gwl
