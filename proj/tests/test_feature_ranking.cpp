// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "qoeopt/feature_ranking.hpp"
#include "qoeopt/rng.hpp"

using namespace qoeopt;

namespace {

Eigen::VectorXd random_series(int n, uint64_t seed, double lo = 0.0,
                              double hi = 1.0) {
  Rng rng(seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.uniform(lo, hi);
  return x;
}

// independent entropy oracle over the published binning
double binned_entropy(Eigen::Ref<const Eigen::VectorXd> x, int bins) {
  const auto [codes, used] = bin_series(x, bins);
  std::vector<long> counts(static_cast<size_t>(used), 0);
  for (int c : codes) ++counts[static_cast<size_t>(c)];
  double h = 0.0;
  const double n = static_cast<double>(codes.size());
  for (long c : counts) {
    if (c > 0) {
      const double p = c / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

TEST_SUITE("feature_ranking") {

TEST_CASE("self-information equals the binned entropy") {
  const Eigen::VectorXd x = random_series(1000, 42);
  const double mi = estimate_mi(x, x, 10);
  const double h = binned_entropy(x, 10);
  CHECK(std::abs(mi - h) < 1e-12);
  // quantile bins on 1000 distinct values: close to log(10) nats
  CHECK(std::abs(h - std::log(10.0)) < 0.05);
}

TEST_CASE("independent series score near zero") {
  const Eigen::VectorXd x = random_series(10000, 1);
  const Eigen::VectorXd y = random_series(10000, 2);
  CHECK(estimate_mi(x, y, 10) < 0.05);
}

TEST_CASE("constant series yield zero with the degenerate flag") {
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(100, 3.0);
  const Eigen::VectorXd y = random_series(100, 5);
  bool degenerate = false;
  CHECK(estimate_mi(x, y, 10, &degenerate) == 0.0);
  CHECK(degenerate);
}

TEST_CASE("estimate is exactly symmetric in its arguments") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::VectorXd x = random_series(500, 100 + seed);
    Eigen::VectorXd y = random_series(500, 200 + seed);
    y += 0.5 * x;  // correlated pair
    const double a = estimate_mi(x, y, 12);
    const double b = estimate_mi(y, x, 12);
    CHECK(a == b);  // bitwise
    CHECK(a >= 0.0);
  }
}

TEST_CASE("jointly permuting the pairs leaves the estimate unchanged") {
  const int n = 400;
  Eigen::VectorXd x = random_series(n, 8);
  Eigen::VectorXd y = 2.0 * x + random_series(n, 9, 0.0, 0.1);
  const double before = estimate_mi(x, y, 10);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng rng(7);
  rng.shuffle(perm);
  Eigen::VectorXd xp(n), yp(n);
  for (int i = 0; i < n; ++i) {
    xp(i) = x(perm[i]);
    yp(i) = y(perm[i]);
  }
  CHECK(estimate_mi(xp, yp, 10) == doctest::Approx(before).epsilon(1e-15));
}

TEST_CASE("permuting one side of a dependent pair destroys the signal") {
  const int n = 5000;
  Eigen::VectorXd x = random_series(n, 21);
  Eigen::VectorXd y = x;  // fully dependent
  const double dependent = estimate_mi(x, y, 10);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng rng(77);
  rng.shuffle(perm);
  Eigen::VectorXd yp(n);
  for (int i = 0; i < n; ++i) yp(i) = y(perm[i]);
  CHECK(dependent > 1.0);
  CHECK(estimate_mi(x, yp, 10) < 0.05);
}

TEST_CASE("input validation") {
  const Eigen::VectorXd x = random_series(10, 1);
  const Eigen::VectorXd y = random_series(9, 2);
  CHECK_THROWS_AS((void)estimate_mi(x, y, 10), Error);
  CHECK_THROWS_AS((void)estimate_mi(x, x, 1), Error);
}

TEST_CASE("ranking puts the generating feature first") {
  // EFPS is mostly a function of FPS in the synthetic ground truth
  Dataset d = assign_splits(generate_synthetic(3000, 11, 0.02),
                            SplitFractions{}, 11);
  const MiTable t = rank_features(d, Kqi::efps, 20);
  REQUIRE(!t.entries.empty());
  CHECK(t.entries[0].feature == feat::fps);
  for (size_t i = 1; i < t.entries.size(); ++i) {
    CHECK(t.entries[i - 1].mi >= t.entries[i].mi);
  }
}

TEST_CASE("independent features tie into canonical order") {
  // target noise is independent of every feature: all scores small and the
  // ordering defaults to the dataset's canonical feature order on near-ties
  const int n = 8000;
  Rng rng(13);
  Eigen::MatrixXd x(n, 3);
  Eigen::MatrixXd y(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(0.0, 1.0);
    y(i, 0) = rng.uniform(0.0, 1.0);
    y(i, 1) = 0.0;
    y(i, 2) = 0.0;
  }
  Dataset d({"a", "b", "c"}, x, y);
  d.set_splits(std::vector<Split>(static_cast<size_t>(n), Split::train));
  const MiTable t = rank_features(d, Kqi::latency, 10);
  for (const auto& e : t.entries) CHECK(e.mi < 0.05);
}

TEST_CASE("center-out order follows the alternation rule") {
  MiTable ranked;
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    MiEntry e;
    e.feature = name;
    ranked.entries.push_back(e);
    ranked.entries.back().mi = 5.0 - static_cast<double>(ranked.entries.size());
  }
  const FeatureOrder order = center_out_order(ranked);
  CHECK(order.order == std::vector<std::string>{"E", "C", "A", "B", "D"});

  MiTable single;
  single.entries.push_back(MiEntry{"A", "t", 1.0, 10, false});
  CHECK(center_out_order(single).order == std::vector<std::string>{"A"});

  MiTable two;
  two.entries.push_back(MiEntry{"A", "t", 2.0, 10, false});
  two.entries.push_back(MiEntry{"B", "t", 1.0, 10, false});
  CHECK(center_out_order(two).order == std::vector<std::string>{"A", "B"});
}

TEST_CASE("center-out output is always a permutation") {
  for (int n = 1; n <= 12; ++n) {
    MiTable ranked;
    for (int i = 0; i < n; ++i) {
      MiEntry e;
      e.feature = "f" + std::to_string(i);
      e.mi = static_cast<double>(n - i);
      ranked.entries.push_back(e);
    }
    const FeatureOrder order = center_out_order(ranked);
    REQUIRE(static_cast<int>(order.order.size()) == n);
    std::vector<std::string> sorted = order.order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
    // highest-MI feature sits at ceil(n/2), 1-based
    CHECK(order.order[static_cast<size_t>((n + 1) / 2 - 1)] == "f0");
  }
}

TEST_CASE("mi table exports csv rows") {
  Dataset d = assign_splits(generate_synthetic(200, 1, 0.1), SplitFractions{}, 1);
  const MiTable t = rank_features(d, Kqi::latency, 10);
  const std::string path = "/tmp/qoeopt_test_mi.csv";
  save_mi_csv(t, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "feature,target,mi,rank");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == d.num_features());
}

}  // TEST_SUITE
