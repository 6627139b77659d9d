#include "gwl/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwl/error.hpp"

namespace gwl {

Matrix covariance_matrix(const Matrix& X) {
  if (X.rows() < 2) throw InputError("covariance_matrix: need at least 2 rows");
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Matrix centered = X.rowwise() - mean;
  Matrix R = (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);
  // Exact symmetry regardless of summation order.
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < R.cols(); ++j) R(j, i) = R(i, j);
  }
  return R;
}

namespace {

double off_diagonal_norm(const Matrix& A) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (i != j) s += A(i, j) * A(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenSystem eigen_symmetric(const Matrix& R) {
  constexpr int kMaxSweeps = 100;
  if (R.rows() != R.cols()) throw InputError("eigen_symmetric: matrix is not square");
  const Eigen::Index n = R.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(R(i, j) - R(j, i)) > 1e-9) throw InputError("eigen_symmetric: matrix is not symmetric");
    }
  }

  Matrix A = R;
  Matrix V = Matrix::Identity(n, n);
  const double tol = 1e-12 * std::max(1.0, R.norm());
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_diagonal_norm(A) > tol; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing A(p, q); t is the smaller root of t^2 + 2 theta t - 1.
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_diagonal_norm(A) > tol) throw NumericError("eigen_symmetric: Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });

  EigenSystem eig;
  eig.sweeps = sweep;
  eig.values.resize(n);
  eig.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    eig.values(k) = A(src, src);
    Vector v = V.col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    eig.vectors.col(k) = v;
  }
  return eig;
}

LoadingTable component_loadings(const EigenSystem& eigen, std::span<const double> column_stddevs,
                                std::span<const int> lags) {
  const Eigen::Index n = eigen.values.size();
  if (eigen.vectors.rows() != n || eigen.vectors.cols() != n) {
    throw InputError("component_loadings: eigenvector shape mismatch");
  }
  if (static_cast<Eigen::Index>(column_stddevs.size()) != n) {
    throw InputError("component_loadings: expected one stddev per variable");
  }
  if (!lags.empty() && static_cast<Eigen::Index>(lags.size()) != n) {
    throw InputError("component_loadings: expected one label per variable");
  }
  const double total = eigen.values.sum();
  if (!(total > 0.0)) throw NumericError("component_loadings: total variance is zero");

  LoadingTable table;
  if (lags.empty()) {
    table.lags.resize(static_cast<std::size_t>(n));
    std::iota(table.lags.begin(), table.lags.end(), 1);
  } else {
    table.lags.assign(lags.begin(), lags.end());
  }
  table.loadings = Matrix::Zero(n, n);
  table.zero_variance.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sigma = column_stddevs[static_cast<std::size_t>(i)];
    if (!(sigma > 0.0)) {
      table.zero_variance[static_cast<std::size_t>(i)] = true;
      continue;
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      table.loadings(i, p) = eigen.vectors(i, p) * std::sqrt(std::max(eigen.values(p), 0.0)) / sigma;
    }
  }
  table.explained = eigen.values / total;
  table.cumulative.resize(n);
  double run = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) {
    run += table.explained(p);
    table.cumulative(p) = run;
  }
  return table;
}

LagSelection select_lags(const LoadingTable& table, double cum_var_threshold, double loading_threshold) {
  if (!(cum_var_threshold > 0.0 && cum_var_threshold <= 1.0)) {
    throw InputError("select_lags: cumulative-variance threshold must lie in (0,1]");
  }
  if (!(loading_threshold >= 0.0 && loading_threshold <= 1.0)) {
    throw InputError("select_lags: loading threshold must lie in [0,1]");
  }
  const Eigen::Index n_comp = table.cumulative.size();
  if (n_comp == 0) throw InputError("select_lags: empty loading table");

  LagSelection sel;
  sel.components_kept = static_cast<int>(n_comp);
  for (Eigen::Index p = 0; p < n_comp; ++p) {
    // Rounding can leave the final cumulative value a hair under 1.
    if (table.cumulative(p) >= cum_var_threshold - 1e-12) {
      sel.components_kept = static_cast<int>(p + 1);
      break;
    }
  }
  for (Eigen::Index i = 0; i < table.loadings.rows(); ++i) {
    bool keep = true;
    for (Eigen::Index p = 0; p < sel.components_kept && keep; ++p) {
      keep = std::abs(table.loadings(i, p)) >= loading_threshold;
    }
    if (keep) sel.lags.push_back(table.lags[static_cast<std::size_t>(i)]);
  }
  if (sel.lags.empty()) throw NumericError("PCA selected empty input set");
  return sel;
}

LoadingTable loadings_from_data(const Matrix& X, std::span<const int> lags) {
  const Matrix R = covariance_matrix(X);
  std::vector<double> sd(static_cast<std::size_t>(R.rows()));
  for (Eigen::Index i = 0; i < R.rows(); ++i) sd[static_cast<std::size_t>(i)] = std::sqrt(std::max(R(i, i), 0.0));
  return component_loadings(eigen_symmetric(R), sd, lags);
}

}  // namespace gwl
