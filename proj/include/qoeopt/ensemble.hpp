// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qoeopt/dataset.hpp"
#include "qoeopt/qubo.hpp"
#include "qoeopt/tree.hpp"

namespace qoeopt {

// Fixed-point binary expansion of a continuous weight:
// w(q) = w_min + step * sum_b 2^b q_b, step = (w_max - w_min) / (2^B - 1).
struct WeightEncoding {
  int bits = 4;
  double w_min = -1.0;
  double w_max = 1.0;

  double step() const {
    return (w_max - w_min) / static_cast<double>((1 << bits) - 1);
  }
};

struct WeakLearnerPool {
  std::vector<RegressionTree> learners;
  std::vector<std::vector<int>> feature_subsets;

  int size() const { return static_cast<int>(learners.size()); }
};

// K depth<=3 trees, each on a seeded bootstrap and a random feature subset of
// size ceil(sqrt(F)). Inputs are the scaled train matrix.
WeakLearnerPool train_pool(const Eigen::MatrixXd& x_scaled,
                           const Eigen::VectorXd& y, int k, uint64_t seed);

// n x K matrix of learner predictions
Eigen::MatrixXd pool_predictions(const WeakLearnerPool& pool,
                                 const Eigen::MatrixXd& x_scaled);

// Exact QUBO expansion of
//   L(q) = sum_n (y_n - sum_i w_i(q) h_i(x_n))^2 + lambda * sum_{i,b} q_{i,b}
// built from the Gram terms G = H^T H and b = H^T y.
QuboProblem build_qubo(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                       const WeightEncoding& enc, double lambda);

Eigen::VectorXd decode_weights(const std::vector<uint8_t>& bits,
                               const WeightEncoding& enc, int k);
std::vector<uint8_t> encode_weights(const Eigen::VectorXd& w,
                                    const WeightEncoding& enc);

enum class QuboSolverKind { simulated_annealing, exact };

struct EnsembleConfig {
  int learners = 32;
  WeightEncoding encoding;
  double lambda = 0.0;
  AnnealSchedule schedule;
  QuboSolverKind solver = QuboSolverKind::simulated_annealing;
  uint64_t seed = 1;
  // when set, the built QUBO is written here for external annealer tooling
  std::string qubo_export_path;
};

// Trained ensemble; inference needs only the decoded weights and the pool.
// The pool and weights live in standardized target space (train mean/std),
// prediction maps back to raw KQI units.
struct EnsembleModel {
  WeakLearnerPool pool;
  Eigen::VectorXd weights;
  WeightEncoding encoding;
  ScalerSpec scaler;
  Kqi target = Kqi::latency;
  double lambda = 0.0;
  uint64_t seed = 0;
  AnnealSchedule schedule;
  double validation_mase = 0.0;
  double train_mean = 0.0;  // also the naive baseline used for reports
  double target_std = 1.0;

  double predict_scaled(Eigen::Ref<const Eigen::VectorXd> x_scaled) const;
  double predict(const Sample& x) const;
};

EnsembleModel fit_ensemble(const Dataset& d, Kqi target,
                           const EnsembleConfig& cfg);

void save_ensemble(const EnsembleModel& m, const std::string& path);
EnsembleModel load_ensemble(const std::string& path);

}  // namespace qoeopt
