// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/maxvol.hpp"

#include <cmath>

namespace qoeopt {

namespace {

// Row permutation from Gaussian elimination with partial pivoting on a tall
// matrix; the first r entries index an invertible (well-pivoted) submatrix.
// Returns false when a pivot collapses even so.
bool pivot_rows(Eigen::MatrixXd c, std::vector<int>& perm, double tol) {
  const int n = static_cast<int>(c.rows());
  const int r = static_cast<int>(c.cols());
  perm.resize(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int j = 0; j < r; ++j) {
    int pivot = j;
    double best = std::abs(c(j, j));
    for (int i = j + 1; i < n; ++i) {
      const double v = std::abs(c(i, j));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best <= tol) return false;
    if (pivot != j) {
      c.row(pivot).swap(c.row(j));
      std::swap(perm[pivot], perm[j]);
    }
    for (int i = j + 1; i < n; ++i) {
      const double factor = c(i, j) / c(j, j);
      c.row(i).tail(r - j) -= factor * c.row(j).tail(r - j);
    }
  }
  return true;
}

}  // namespace

std::vector<int> maxvol(const Eigen::MatrixXd& a, double delta, int max_iter) {
  const int n = static_cast<int>(a.rows());
  const int r = static_cast<int>(a.cols());
  if (n < r || r < 1) {
    throw Error(Errc::invalid_value, "maxvol needs n >= r >= 1");
  }
  if (n == r) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return all;
  }

  const double scale = a.cwiseAbs().maxCoeff();
  const double tol = 1e-14 * std::max(scale, 1.0);

  std::vector<int> perm;
  if (!pivot_rows(a, perm, tol)) {
    // flat or rank-deficient block: jitter the leading diagonal and retry
    Eigen::MatrixXd jittered = a;
    for (int j = 0; j < r; ++j) jittered(j, j) += 1e-12;
    if (!pivot_rows(jittered, perm, 0.0)) {
      throw Error(Errc::numerical_rank, "maxvol: rank-deficient matrix");
    }
  }
  std::vector<int> rows(perm.begin(), perm.begin() + r);

  // B = A * A[rows]^{-1}; iteratively swap in the worst violating row
  Eigen::MatrixXd sub(r, r);
  for (int j = 0; j < r; ++j) sub.row(j) = a.row(rows[j]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sub.transpose());
  Eigen::MatrixXd b = lu.solve(a.transpose()).transpose();

  for (int iter = 0; iter < max_iter; ++iter) {
    int bi = 0, bj = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < r; ++j) {
        const double v = std::abs(b(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (best <= 1.0 + delta) break;

    const double pivot = b(bi, bj);
    Eigen::VectorXd col = b.col(bj);
    Eigen::RowVectorXd row = b.row(bi);
    row(bj) -= 1.0;
    b.noalias() -= col * row / pivot;
    rows[bj] = bi;
  }
  return rows;
}

}  // namespace qoeopt
