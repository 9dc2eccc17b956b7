// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/feature_ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace qoeopt {

namespace {

// type-7 quantile on sorted values
double quantile_sorted(const std::vector<double>& v, double p) {
  const size_t n = v.size();
  if (n == 1) return v[0];
  const double h = p * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= n) return v[n - 1];
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace

std::pair<std::vector<int>, int> bin_series(
    Eigen::Ref<const Eigen::VectorXd> x, int bins) {
  const int n = static_cast<int>(x.size());
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<int> codes(n);
  if (static_cast<int>(distinct.size()) <= bins) {
    // native categories
    for (int i = 0; i < n; ++i) {
      codes[i] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), x(i)) -
          distinct.begin());
    }
    return {codes, static_cast<int>(distinct.size())};
  }

  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    edges.push_back(quantile_sorted(sorted, static_cast<double>(k) / bins));
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (int i = 0; i < n; ++i) {
    codes[i] = static_cast<int>(
        std::upper_bound(edges.begin(), edges.end(), x(i)) - edges.begin());
  }
  return {codes, static_cast<int>(edges.size()) + 1};
}

double estimate_mi(Eigen::Ref<const Eigen::VectorXd> x,
                   Eigen::Ref<const Eigen::VectorXd> y, int bins,
                   bool* degenerate) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::invalid_value, "series must have equal length >= 2");
  }
  if (bins < 2) throw Error(Errc::invalid_value, "need at least 2 bins");

  const auto [cx, mx] = bin_series(x, bins);
  const auto [cy, my] = bin_series(y, bins);
  if (degenerate) *degenerate = (mx <= 1 || my <= 1);
  if (mx <= 1 || my <= 1) return 0.0;

  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(mx, my);
  for (int i = 0; i < n; ++i) joint(cx[i], cy[i]) += 1.0;
  const Eigen::VectorXd px = joint.rowwise().sum() / n;
  const Eigen::VectorXd py = joint.colwise().sum().transpose() / n;

  // Per-cell terms are summed in sorted order so that the estimate is exactly
  // argument-symmetric (the multiset of terms is transpose-invariant).
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(mx) * my);
  for (int i = 0; i < mx; ++i) {
    for (int j = 0; j < my; ++j) {
      const double c = joint(i, j);
      if (c <= 0.0) continue;
      const double pxy = c / n;
      terms.push_back(pxy * std::log(pxy / (px(i) * py(j))));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;
  return std::max(0.0, mi);
}

MiTable rank_features(const Dataset& d, Kqi target, int bins) {
  if (!d.has_splits()) {
    throw Error(Errc::invalid_value, "MI ranking requires a train split");
  }
  const std::vector<int> rows = d.split_rows(Split::train);
  if (rows.size() < 2) throw Error(Errc::empty_input, "train split too small");

  Eigen::VectorXd y(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    y(static_cast<int>(i)) = d.targets()(rows[i], static_cast<int>(target));
  }

  MiTable table;
  table.target = kqi_name(target);
  const int f = d.num_features();
  std::vector<int> canonical_pos(f);
  for (int c = 0; c < f; ++c) {
    Eigen::VectorXd x(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      x(static_cast<int>(i)) = d.features()(rows[i], c);
    }
    MiEntry e;
    e.feature = d.feature_names()[c];
    e.target = table.target;
    e.bins_used = bins;
    e.mi = estimate_mi(x, y, bins, &e.degenerate);
    table.entries.push_back(std::move(e));
    canonical_pos[c] = c;
  }

  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [&](const MiEntry& a, const MiEntry& b) {
                     if (a.mi != b.mi) return a.mi > b.mi;
                     return d.feature_index(a.feature) <
                            d.feature_index(b.feature);
                   });
  return table;
}

FeatureOrder center_out_order(const MiTable& ranked) {
  const int n = static_cast<int>(ranked.entries.size());
  if (n == 0) throw Error(Errc::empty_input, "empty ranking");

  // 1-based center position ceil(n/2); overflow alternates right first
  const int center = (n + 1) / 2;
  std::vector<std::string> order(n);
  int right = center;      // next slot to the right (1-based)
  int left = center - 1;   // next slot to the left
  for (int i = 0; i < n; ++i) {
    int pos;
    if (i == 0) {
      pos = center;
      ++right;
    } else if (i % 2 == 1) {
      if (right <= n) pos = right++;
      else pos = left--;
    } else {
      if (left >= 1) pos = left--;
      else pos = right++;
    }
    order[pos - 1] = ranked.entries[i].feature;
  }
  return FeatureOrder{order, true};
}

void save_mi_csv(const MiTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << "feature,target,mi,rank\n";
  for (size_t i = 0; i < t.entries.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t.entries[i].mi);
    out << '"' << t.entries[i].feature << "\",\"" << t.entries[i].target
        << "\"," << buf << ',' << (i + 1) << '\n';
  }
}

}  // namespace qoeopt
