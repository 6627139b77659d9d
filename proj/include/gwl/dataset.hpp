#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gwl/types.hpp"

namespace gwl {

/// Monthly groundwater-level record of one piezometer.
struct TimeSeries {
  std::string id;
  std::vector<int> months;     // consecutive, 1-based
  std::vector<double> levels;  // meters

  std::size_t size() const { return levels.size(); }
};

/// Reads the `month,level` CSV format. Rows may appear in any order; they
/// are sorted by month and must then be consecutive.
TimeSeries parse_series(std::istream& in, std::string id = {});
TimeSeries read_series(const std::filesystem::path& path);
void write_series(std::ostream& out, const TimeSeries& series);

/// Lagged design matrix: column j of row r holds the level `lags[j]` months
/// before the row's target month.
struct LaggedDataset {
  std::vector<int> lags;
  std::vector<int> target_months;
  Matrix X;  // meters
  Vector y;  // meters

  std::size_t rows() const { return static_cast<std::size_t>(y.size()); }
  LaggedDataset subset(std::span<const std::size_t> rows) const;
  /// Keeps only the given lag columns (each must be present).
  LaggedDataset select_columns(std::span<const int> keep) const;
};

LaggedDataset build_lagged(const TimeSeries& series, std::span<const int> lags);

/// 1..max_lag.
std::vector<int> lag_range(int max_lag);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Seeded shuffle, first round(test_fraction * n) rows become the test set.
/// Both index lists are returned in ascending order.
SplitIndices random_split(std::size_t n_rows, double test_fraction, std::uint64_t seed);

struct ColumnRange {
  double min = 0.0;
  double max = 1.0;
  bool constant() const { return !(max > min); }
};

struct ScalingParams {
  std::vector<ColumnRange> features;
  ColumnRange target;
};

enum class Direction { Forward, Inverse };

ScalingParams fit_scaler(const Matrix& X, const Vector& y);

/// Min-max map of one value; constant columns map to 0.5 and back to `min`.
double scale_value(double v, const ColumnRange& range, Direction dir);
Matrix transform(const Matrix& X, const ScalingParams& params, Direction dir);
Vector transform_target(const Vector& y, const ScalingParams& params, Direction dir);

}  // namespace gwl
