#pragma once

#include <span>
#include <vector>

#include "gwl/types.hpp"

namespace gwl {

/// Sample covariance (n - 1 denominator) of the columns of X.
Matrix covariance_matrix(const Matrix& X);

struct EigenSystem {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values(i); orthonormal
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Each eigenvector
/// is signed so its largest-magnitude entry is positive.
EigenSystem eigen_symmetric(const Matrix& R);

struct LoadingTable {
  std::vector<int> lags;             // variable labels, one per row
  Matrix loadings;                   // variables x components
  Vector explained;                  // variance fraction per component
  Vector cumulative;                 // running sum of `explained`
  std::vector<bool> zero_variance;   // variables whose loadings were zeroed
};

/// loading(i, p) = v_p[i] * sqrt(lambda_p) / sigma_i.
LoadingTable component_loadings(const EigenSystem& eigen, std::span<const double> column_stddevs,
                                std::span<const int> lags = {});

struct LagSelection {
  std::vector<int> lags;
  int components_kept = 0;
};

/// Keeps the shortest prefix of components reaching `cum_var_threshold`,
/// then every variable with |loading| >= `loading_threshold` on all kept
/// components.
LagSelection select_lags(const LoadingTable& table, double cum_var_threshold, double loading_threshold);

/// Loading table of the given lag columns, straight from data.
LoadingTable loadings_from_data(const Matrix& X, std::span<const int> lags);

}  // namespace gwl
