// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "qoeopt/metrics.hpp"
#include "qoeopt/rng.hpp"

using namespace qoeopt;

TEST_SUITE("metrics") {

TEST_CASE("perfect predictions score zero, the baseline scores one") {
  Eigen::VectorXd actual(4);
  actual << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXd naive = Eigen::VectorXd::Constant(4, actual.mean());

  CHECK(mase(actual, actual, naive).mase == 0.0);
  CHECK(mase(naive, actual, naive).mase == 1.0);
}

TEST_CASE("hand-computed example") {
  Eigen::VectorXd actual(2), naive(2), pred(2);
  actual << 0.0, 2.0;
  naive << 1.0, 1.0;
  pred << 0.5, 1.5;
  const MaseReport r = mase(pred, actual, naive);
  CHECK(r.mase == doctest::Approx(0.5));
  CHECK(r.model_mae == doctest::Approx(0.5));
  CHECK(r.naive_mae == doctest::Approx(1.0));
  CHECK(r.n == 2);
}

TEST_CASE("scale equivariance") {
  Rng rng(5);
  Eigen::VectorXd actual(50), pred(50), naive(50);
  for (int i = 0; i < 50; ++i) {
    actual(i) = rng.uniform(1.0, 10.0);
    pred(i) = actual(i) + rng.uniform(-1.0, 1.0);
    naive(i) = 5.0;
  }
  const double base = mase(pred, actual, naive).mase;
  for (double c : {2.0, 17.5, 1e6}) {
    const double scaled = mase(pred * c, actual * c, naive * c).mase;
    CHECK(std::abs(scaled - base) < 1e-12 * std::max(1.0, base));
  }
}

TEST_CASE("permutation invariance") {
  Rng rng(6);
  Eigen::VectorXd actual(30), pred(30), naive(30);
  for (int i = 0; i < 30; ++i) {
    actual(i) = rng.uniform(0.0, 5.0);
    pred(i) = rng.uniform(0.0, 5.0);
    naive(i) = 2.5;
  }
  const double base = mase(pred, actual, naive).mase;

  std::vector<int> perm(30);
  for (int i = 0; i < 30; ++i) perm[i] = i;
  rng.shuffle(perm);
  Eigen::VectorXd a2(30), p2(30), n2(30);
  for (int i = 0; i < 30; ++i) {
    a2(i) = actual(perm[i]);
    p2(i) = pred(perm[i]);
    n2(i) = naive(perm[i]);
  }
  CHECK(mase(p2, a2, n2).mase == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("constant targets make the baseline undefined") {
  const Eigen::VectorXd actual = Eigen::VectorXd::Constant(5, 3.0);
  const Eigen::VectorXd naive = Eigen::VectorXd::Constant(5, 3.0);
  CHECK_THROWS_AS((void)mase(actual, actual, naive), Error);
}

TEST_CASE("length validation") {
  Eigen::VectorXd a(3), b(2);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS((void)mase(a, b, a), Error);
}

TEST_CASE("timing harness contract") {
  int loads = 0, infers = 0;
  const TimingReport r = time_model(
      [&] {
        ++loads;
        std::this_thread::sleep_for(std::chrono::microseconds(200));
      },
      [&] {
        ++infers;
        std::this_thread::sleep_for(std::chrono::microseconds(400));
      },
      20, 694);
  CHECK(loads == 20);
  CHECK(infers == 20);
  CHECK(r.runs == 20);
  CHECK(r.test_set_size == 694);
  CHECK(r.load_ms > 0.0);
  CHECK(r.infer_ms > 0.0);
  CHECK_FALSE(r.low_confidence);

  // single-run reports carry the low-confidence flag
  const TimingReport one = time_model([] {}, [] {}, 1, 10);
  CHECK(one.low_confidence);
  CHECK(one.runs == 1);
}

TEST_CASE("repeated timings are statistically self consistent") {
  auto work = [] {
    volatile double acc = 0.0;
    for (int i = 0; i < 20000; ++i) {
      acc = acc + std::sqrt(static_cast<double>(i));
    }
  };
  const TimingReport big = time_model(work, work, 50, 1);
  const TimingReport small = time_model(work, work, 5, 1);
  // means agree within three standard deviations of the larger sample
  const double band = 3.0 * std::max(big.infer_std_ms, 1e-3);
  CHECK(std::abs(big.infer_ms - small.infer_ms) <= band + 0.5);
}

TEST_CASE("failures propagate with the run index") {
  int calls = 0;
  CHECK_THROWS_WITH_AS((void)time_model(
                           [&] {
                             if (++calls == 3) throw std::runtime_error("boom");
                           },
                           [] {}, 10, 1),
                       doctest::Contains("run 2"), Error);
}

TEST_CASE("run count validation") {
  CHECK_THROWS_AS((void)time_model([] {}, [] {}, 0, 1), Error);
}

}  // TEST_SUITE
