// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qoeopt/error.hpp"

namespace qoeopt {

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return left < 0; }
};

// Axis-aligned CART regression tree with squared-error splits.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes)
      : nodes_(std::move(nodes)) {}

  static RegressionTree fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const std::vector<int>& rows,
                            const std::vector<int>& features, int max_depth,
                            int min_leaf);

  double predict(Eigen::Ref<const Eigen::VectorXd> x) const;
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace qoeopt
