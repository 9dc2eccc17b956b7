// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "qoeopt/dataset.hpp"

namespace qoeopt {

struct MiEntry {
  std::string feature;
  std::string target;
  double mi = 0.0;  // nats
  int bins_used = 0;
  bool degenerate = false;
};

// Entries sorted by decreasing MI, ties broken by canonical feature order.
struct MiTable {
  std::string target;
  std::vector<MiEntry> entries;
};

struct FeatureOrder {
  std::vector<std::string> order;
  bool center_out = true;
};

// Bin codes for a series: native categories when there are at most `bins`
// distinct values, equal-frequency (quantile) bins otherwise. Returns the
// codes and the number of bins actually used.
std::pair<std::vector<int>, int> bin_series(
    Eigen::Ref<const Eigen::VectorXd> x, int bins);

// Histogram plug-in estimate of mutual information, in nats. Constant series
// yield 0 with the degenerate flag set.
double estimate_mi(Eigen::Ref<const Eigen::VectorXd> x,
                   Eigen::Ref<const Eigen::VectorXd> y, int bins,
                   bool* degenerate = nullptr);

// MI of every feature against one target KQI, computed on the train split.
MiTable rank_features(const Dataset& d, Kqi target, int bins = 20);

// Highest-MI feature at position ceil(N/2); the rest placed alternately
// right, then left of center.
FeatureOrder center_out_order(const MiTable& ranked);

// (feature, target, mi, rank) rows for plotting scripts
void save_mi_csv(const MiTable& t, const std::string& path);

}  // namespace qoeopt
