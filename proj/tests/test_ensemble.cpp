// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "qoeopt/ensemble.hpp"
#include "qoeopt/metrics.hpp"
#include "qoeopt/rng.hpp"

using namespace qoeopt;

namespace {

// independent oracle: evaluate the regularized squared loss directly from the
// decoded weights, never through the QUBO expansion
double direct_loss(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                   const WeightEncoding& enc, double lambda,
                   const std::vector<uint8_t>& bits) {
  const int k = static_cast<int>(h.cols());
  const Eigen::VectorXd w = decode_weights(bits, enc, k);
  double loss = (y - h * w).squaredNorm();
  for (uint8_t b : bits) loss += lambda * b;
  return loss;
}

std::vector<uint8_t> bits_of(uint64_t m, int n) {
  std::vector<uint8_t> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = static_cast<uint8_t>((m >> i) & 1ULL);
  return bits;
}

Dataset synthetic_with_splits(int n, uint64_t seed, double noise) {
  return assign_splits(generate_synthetic(n, seed, noise), SplitFractions{},
                       seed);
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("qubo expansion matches brute-force loss on every bitstring") {
  // 20 seeded instances with K*B <= 16
  for (uint64_t inst = 0; inst < 20; ++inst) {
    Rng rng(9000 + inst);
    const int k = 2 + static_cast<int>(inst % 3);  // 2..4 learners
    const int bits_per = (k == 2) ? 2 + static_cast<int>(inst % 3) : 2;
    const int samples = 5 + static_cast<int>(inst % 4);
    const double lambda = (inst % 2) ? 0.3 : 0.0;

    Eigen::MatrixXd h(samples, k);
    Eigen::VectorXd y(samples);
    for (int i = 0; i < samples; ++i) {
      y(i) = rng.uniform(-2.0, 2.0);
      for (int j = 0; j < k; ++j) h(i, j) = rng.uniform(-1.0, 1.0);
    }
    WeightEncoding enc;
    enc.bits = bits_per;

    const QuboProblem p = build_qubo(h, y, enc, lambda);
    REQUIRE(p.size() == k * bits_per);
    REQUIRE(p.size() <= 16);

    for (uint64_t m = 0; m < (1ULL << p.size()); ++m) {
      const auto q = bits_of(m, p.size());
      const double lhs = p.energy(q);
      const double rhs = direct_loss(h, y, enc, lambda, q);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("single learner reproducing the target decodes to the grid value nearest 1") {
  // h1 == y on the train data, lambda = 0
  Eigen::VectorXd y(6);
  y << 0.4, -1.2, 2.0, 0.9, -0.3, 1.4;
  Eigen::MatrixXd h = y;

  WeightEncoding enc;  // (-1, 1), 4 bits: 1.0 is the top grid code
  const QuboProblem p = build_qubo(h, y, enc, 0.0);
  const QuboSolution s = solve_exact(p);
  const Eigen::VectorXd w = decode_weights(s.bits, enc, 1);
  CHECK(w(0) == doctest::Approx(1.0));
}

TEST_CASE("all-zero targets with positive lambda keep every bit off") {
  Rng rng(4);
  Eigen::MatrixXd h(8, 3);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) h(i, j) = rng.uniform(-1.0, 1.0);
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(8);

  WeightEncoding enc;
  enc.w_min = 0.0;  // zero weight representable, so all-zero minimizes both terms
  const QuboProblem p = build_qubo(h, y, enc, 0.5);
  const QuboSolution s = solve_exact(p);
  CHECK(s.bits == std::vector<uint8_t>(12, 0));
  CHECK(s.energy == doctest::Approx(0.0));
}

TEST_CASE("decode endpoints") {
  WeightEncoding enc;
  enc.bits = 4;
  enc.w_min = 0.0;
  enc.w_max = 1.0;
  CHECK(decode_weights(std::vector<uint8_t>{1, 1, 1, 1}, enc, 1)(0) ==
        doctest::Approx(1.0));
  CHECK(decode_weights(std::vector<uint8_t>{0, 0, 0, 0}, enc, 1)(0) ==
        doctest::Approx(0.0));
  WeightEncoding sym;  // bits 0000 decode to w_min
  CHECK(decode_weights(std::vector<uint8_t>{0, 0, 0, 0}, sym, 1)(0) ==
        doctest::Approx(sym.w_min));
}

TEST_CASE("encode/decode lands within half a step") {
  WeightEncoding enc;
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double w = rng.uniform(-1.3, 1.3);
    const auto bits = encode_weights(Eigen::VectorXd::Constant(1, w), enc);
    const double back = decode_weights(bits, enc, 1)(0);
    const double clamped = std::clamp(w, enc.w_min, enc.w_max);
    CHECK(std::abs(back - clamped) <= enc.step() / 2 + 1e-12);
  }
}

TEST_CASE("train_pool determinism and finiteness") {
  const Dataset d = synthetic_with_splits(300, 21, 0.1);
  const ScalerSpec scaler = fit_scaler(d, d.feature_names());
  const std::vector<int> rows = d.split_rows(Split::train);
  const Eigen::MatrixXd x = apply_scaler(scaler, d, rows);
  Eigen::VectorXd y(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    y(static_cast<int>(i)) = d.targets()(rows[i], 0);
  }

  const WeakLearnerPool a = train_pool(x, y, 8, 5);
  const WeakLearnerPool b = train_pool(x, y, 8, 5);
  const Eigen::MatrixXd ha = pool_predictions(a, x);
  const Eigen::MatrixXd hb = pool_predictions(b, x);
  CHECK(ha == hb);
  CHECK(ha.allFinite());

  CHECK_THROWS_AS((void)train_pool(x.topRows(1), y.head(1), 4, 1), Error);
}

TEST_CASE("pool mean prediction beats the naive baseline") {
  const Dataset d = synthetic_with_splits(2000, 33, 0.1);
  const ScalerSpec scaler = fit_scaler(d, d.feature_names());
  const std::vector<int> rows = d.split_rows(Split::train);
  const Eigen::MatrixXd x = apply_scaler(scaler, d, rows);
  Eigen::VectorXd y(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    y(static_cast<int>(i)) = d.targets()(rows[i], static_cast<int>(Kqi::efps));
  }

  const WeakLearnerPool pool = train_pool(x, y, 32, 7);
  const Eigen::VectorXd mean_pred = pool_predictions(pool, x).rowwise().mean();
  const double pool_mae = (mean_pred - y).cwiseAbs().mean();
  const double naive_mae = (y.array() - y.mean()).abs().mean();
  CHECK(pool_mae <= naive_mae);
}

TEST_CASE("regularization never increases the exact-solver bit count") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(700 + seed);
    const int k = 3, b = 3, samples = 12;
    Eigen::MatrixXd h(samples, k);
    Eigen::VectorXd y(samples);
    for (int i = 0; i < samples; ++i) {
      y(i) = rng.uniform(-2.0, 2.0);
      for (int j = 0; j < k; ++j) h(i, j) = rng.uniform(-1.0, 1.0);
    }
    WeightEncoding enc;
    enc.bits = b;

    int prev_bits = k * b + 1;
    for (double lambda : {0.0, 0.05, 0.2, 1.0, 5.0}) {
      const QuboSolution s = solve_exact(build_qubo(h, y, enc, lambda));
      int set = 0;
      for (uint8_t q : s.bits) set += q;
      CHECK(set <= prev_bits);
      prev_bits = set;
    }
  }
}

TEST_CASE("fit with exact solver recovers a pool member target") {
  // target equals one learner's own output: validation MASE must be small
  Dataset d = synthetic_with_splits(400, 51, 0.0);

  EnsembleConfig cfg;
  cfg.learners = 4;
  cfg.encoding.bits = 4;
  cfg.encoding.w_min = 0.0;
  cfg.encoding.w_max = 1.0;
  cfg.solver = QuboSolverKind::exact;
  cfg.seed = 3;

  // first fit to obtain the pool, then rebuild the dataset with the target
  // replaced by learner 0's predictions
  const EnsembleModel probe = fit_ensemble(d, Kqi::latency, cfg);
  Eigen::MatrixXd targets = d.targets();
  for (int i = 0; i < d.size(); ++i) {
    const Eigen::VectorXd x = apply_scaler(probe.scaler, d.sample(i));
    targets(i, 0) = probe.pool.learners[0].predict(x);
  }
  Dataset d2(d.feature_names(), d.features(), targets);
  d2.set_splits(d.splits());

  const EnsembleModel m = fit_ensemble(d2, Kqi::latency, cfg);
  CHECK(m.validation_mase < 0.2);
}

TEST_CASE("serialized model reproduces predictions bit for bit") {
  const Dataset d = synthetic_with_splits(500, 77, 0.1);
  EnsembleConfig cfg;
  cfg.learners = 12;
  cfg.schedule.sweeps = 300;
  cfg.schedule.restarts = 3;
  cfg.seed = 9;
  const EnsembleModel m = fit_ensemble(d, Kqi::efps, cfg);

  const std::string path = "/tmp/qoeopt_test_ensemble.json";
  save_ensemble(m, path);
  const EnsembleModel r = load_ensemble(path);

  for (int i = 0; i < 50; ++i) {
    const Sample s = d.sample(i);
    CHECK(m.predict(s) == r.predict(s));
  }
  CHECK(m.weights == r.weights);
}

TEST_CASE("predict rejects NaN input") {
  const Dataset d = synthetic_with_splits(200, 3, 0.0);
  EnsembleConfig cfg;
  cfg.learners = 4;
  cfg.schedule.sweeps = 100;
  cfg.schedule.restarts = 2;
  const EnsembleModel m = fit_ensemble(d, Kqi::latency, cfg);
  Sample s = d.sample(0);
  s.features[feat::sinr] = std::nan("");
  CHECK_THROWS_AS((void)m.predict(s), Error);
}

}  // TEST_SUITE
