#include "gwl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/format.hpp"
#include "gwl/random.hpp"

namespace gwl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

TimeSeries parse_series(std::istream& in, std::string id) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::pair<int, double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (view != "month,level") {
        throw InputError("series: expected header 'month,level' at line " + std::to_string(line_no));
      }
      continue;
    }
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw InputError("series: missing ',' at line " + std::to_string(line_no));
    }
    int month = 0;
    double level = 0.0;
    if (!parse_number(view.substr(0, comma), month)) {
      throw InputError("series: bad month at line " + std::to_string(line_no));
    }
    if (!parse_number(view.substr(comma + 1), level) || !std::isfinite(level)) {
      throw InputError("series: non-numeric level at line " + std::to_string(line_no));
    }
    rows.emplace_back(month, level);
  }
  if (!header_seen) throw InputError("series: empty input");
  if (rows.empty()) throw InputError("series: no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  TimeSeries series;
  series.id = std::move(id);
  series.months.reserve(rows.size());
  series.levels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first != rows[i - 1].first + 1) {
      throw InputError("month gap at index " + std::to_string(i));
    }
    series.months.push_back(rows[i].first);
    series.levels.push_back(rows[i].second);
  }
  return series;
}

TimeSeries read_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open series file: " + path.string());
  return parse_series(in, path.stem().string());
}

void write_series(std::ostream& out, const TimeSeries& series) {
  out << "month,level\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.months[i] << ',' << format_double(series.levels[i]) << '\n';
  }
}

std::vector<int> lag_range(int max_lag) {
  std::vector<int> lags(static_cast<std::size_t>(std::max(max_lag, 0)));
  std::iota(lags.begin(), lags.end(), 1);
  return lags;
}

LaggedDataset build_lagged(const TimeSeries& series, std::span<const int> lags) {
  if (lags.empty()) throw InputError("build_lagged: no lags given");
  std::set<int> seen;
  for (int lag : lags) {
    if (lag < 1 || lag > 12) throw InputError("build_lagged: lag out of range [1,12]: " + std::to_string(lag));
    if (!seen.insert(lag).second) throw InputError("build_lagged: duplicate lag " + std::to_string(lag));
  }
  const int max_lag = *std::max_element(lags.begin(), lags.end());
  const std::size_t n = series.size();
  if (n < static_cast<std::size_t>(max_lag) + 1) {
    throw InputError("build_lagged: series of length " + std::to_string(n) +
                     " is too short for lag " + std::to_string(max_lag));
  }

  const std::size_t rows = n - static_cast<std::size_t>(max_lag);
  LaggedDataset data;
  data.lags.assign(lags.begin(), lags.end());
  data.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(lags.size()));
  data.y.resize(static_cast<Eigen::Index>(rows));
  data.target_months.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + static_cast<std::size_t>(max_lag);
    data.y(static_cast<Eigen::Index>(r)) = series.levels[t];
    data.target_months[r] = series.months[t];
    for (std::size_t j = 0; j < lags.size(); ++j) {
      data.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          series.levels[t - static_cast<std::size_t>(lags[j])];
    }
  }
  return data;
}

LaggedDataset LaggedDataset::subset(std::span<const std::size_t> keep) const {
  LaggedDataset out;
  out.lags = lags;
  out.X.resize(static_cast<Eigen::Index>(keep.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(keep.size()));
  out.target_months.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= rows()) throw InputError("subset: row index out of range");
    const auto r = static_cast<Eigen::Index>(keep[i]);
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.y(static_cast<Eigen::Index>(i)) = y(r);
    out.target_months.push_back(target_months[keep[i]]);
  }
  return out;
}

LaggedDataset LaggedDataset::select_columns(std::span<const int> keep) const {
  LaggedDataset out;
  out.lags.assign(keep.begin(), keep.end());
  out.target_months = target_months;
  out.y = y;
  out.X.resize(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const auto it = std::find(lags.begin(), lags.end(), keep[j]);
    if (it == lags.end()) throw InputError("select_columns: lag " + std::to_string(keep[j]) + " not present");
    out.X.col(static_cast<Eigen::Index>(j)) = X.col(it - lags.begin());
  }
  return out;
}

SplitIndices random_split(std::size_t n_rows, double test_fraction, std::uint64_t seed) {
  if (n_rows < 5) throw InputError("random_split: need at least 5 rows, got " + std::to_string(n_rows));
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("random_split: test_fraction must lie in (0,1)");
  }
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n_rows - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n_rows)));

  SplitIndices split;
  split.seed = seed;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

ScalingParams fit_scaler(const Matrix& X, const Vector& y) {
  if (X.rows() == 0 || y.size() == 0) throw InputError("fit_scaler: empty data");
  ScalingParams params;
  params.features.reserve(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    params.features.push_back({X.col(j).minCoeff(), X.col(j).maxCoeff()});
  }
  params.target = {y.minCoeff(), y.maxCoeff()};
  return params;
}

double scale_value(double v, const ColumnRange& range, Direction dir) {
  if (range.constant()) return dir == Direction::Forward ? 0.5 : range.min;
  const double span = range.max - range.min;
  return dir == Direction::Forward ? (v - range.min) / span : range.min + v * span;
}

Matrix transform(const Matrix& X, const ScalingParams& params, Direction dir) {
  if (static_cast<std::size_t>(X.cols()) != params.features.size()) {
    throw InputError("transform: data has " + std::to_string(X.cols()) + " columns, scaler has " +
                     std::to_string(params.features.size()));
  }
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      out(r, j) = scale_value(X(r, j), params.features[static_cast<std::size_t>(j)], dir);
    }
  }
  return out;
}

Vector transform_target(const Vector& y, const ScalingParams& params, Direction dir) {
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = scale_value(y(i), params.target, dir);
  return out;
}

}  // namespace gwl
