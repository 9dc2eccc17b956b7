// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace qoeopt {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// best squared-error split of `rows` on one feature; thresholds at midpoints
// between consecutive distinct values
SplitChoice best_split_on_feature(const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y,
                                  const std::vector<int>& rows, int feature,
                                  int min_leaf) {
  const int n = static_cast<int>(rows.size());
  std::vector<int> order = rows;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x(a, feature) != x(b, feature)) return x(a, feature) < x(b, feature);
    return a < b;
  });

  std::vector<double> prefix_sum(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    prefix_sum[i + 1] = prefix_sum[i] + y(order[i]);
    prefix_sq[i + 1] = prefix_sq[i] + y(order[i]) * y(order[i]);
  }

  SplitChoice best;
  best.feature = feature;
  for (int i = min_leaf; i <= n - min_leaf; ++i) {
    const double lo = x(order[i - 1], feature);
    const double hi = x(order[i], feature);
    if (!(hi > lo)) continue;
    const double ls = prefix_sum[i];
    const double lq = prefix_sq[i];
    const double rs = prefix_sum[n] - ls;
    const double rq = prefix_sq[n] - lq;
    const double sse = (lq - ls * ls / i) + (rq - rs * rs / (n - i));
    if (sse < best.sse) {
      best.sse = sse;
      best.threshold = 0.5 * (lo + hi);
    }
  }
  return best;
}

}  // namespace

RegressionTree RegressionTree::fit(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y,
                                   const std::vector<int>& rows,
                                   const std::vector<int>& features,
                                   int max_depth, int min_leaf) {
  if (rows.empty()) throw Error(Errc::empty_input, "no rows to fit");

  std::vector<TreeNode> nodes;

  // recursive builder returning node index
  std::function<int(const std::vector<int>&, int)> build =
      [&](const std::vector<int>& node_rows, int depth) -> int {
    const int n = static_cast<int>(node_rows.size());
    double mean = 0.0;
    for (int r : node_rows) mean += y(r);
    mean /= n;

    const int index = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{});
    nodes[index].value = mean;

    if (depth >= max_depth || n < 2 * min_leaf) return index;

    double node_sse = 0.0;
    for (int r : node_rows) node_sse += (y(r) - mean) * (y(r) - mean);
    if (node_sse <= 0.0) return index;

    SplitChoice best;
    for (int f : features) {
      const SplitChoice c = best_split_on_feature(x, y, node_rows, f, min_leaf);
      if (c.sse < best.sse) best = c;
    }
    if (best.feature < 0 || !(best.sse < node_sse)) return index;

    std::vector<int> left_rows, right_rows;
    for (int r : node_rows) {
      (x(r, best.feature) <= best.threshold ? left_rows : right_rows)
          .push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) return index;

    nodes[index].feature = best.feature;
    nodes[index].threshold = best.threshold;
    const int li = build(left_rows, depth + 1);
    const int ri = build(right_rows, depth + 1);
    nodes[index].left = li;
    nodes[index].right = ri;
    return index;
  };

  build(rows, 0);
  return RegressionTree(std::move(nodes));
}

double RegressionTree::predict(Eigen::Ref<const Eigen::VectorXd> x) const {
  int i = 0;
  while (!nodes_[i].is_leaf()) {
    i = (x(nodes_[i].feature) <= nodes_[i].threshold) ? nodes_[i].left
                                                      : nodes_[i].right;
  }
  return nodes_[i].value;
}

Eigen::VectorXd RegressionTree::predict_rows(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (int i = 0; i < x.rows(); ++i) {
    out(i) = predict(x.row(i).transpose());
  }
  return out;
}

}  // namespace qoeopt
