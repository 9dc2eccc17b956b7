// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qoeopt/error.hpp"

namespace qoeopt {

// Quasi-maximal-volume row selection for a tall n x r matrix: returns r row
// indices I such that every entry of A * A[I]^{-1} has magnitude <= 1 + delta
// (or max_iter swaps were made). Initialization is the partial-pivot LU row
// order; singular pivots get a 1e-12 diagonal jitter before failing with a
// numerical-rank error.
std::vector<int> maxvol(const Eigen::MatrixXd& a, double delta = 0.01,
                        int max_iter = 100);

}  // namespace qoeopt
