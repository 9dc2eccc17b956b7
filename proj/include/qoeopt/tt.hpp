// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qoeopt/dataset.hpp"
#include "qoeopt/feature_ranking.hpp"

namespace qoeopt {

struct TrainConfig {
  int rank = 4;
  double learning_rate = 1e-2;
  int epochs = 200;
  int batch_size = 64;
  uint64_t seed = 1;
  double init_scale = 0.1;
  double clip_norm = 10.0;
};

// Tensor-train regressor over integer feature indices. Core k holds one
// (r_{k-1} x r_k) slice per grid value of feature k; boundary ranks are 1.
// Targets are standardized by train mean/std during training and mapped back
// at prediction time.
struct TTModel {
  // cores[k][j] is the slice for index j of feature k
  std::vector<std::vector<Eigen::MatrixXd>> cores;
  FeatureOrder order;
  DiscretizerSpec discretizer;  // aligned with order
  Kqi target = Kqi::latency;
  double target_mean = 0.0;
  double target_std = 1.0;
  double train_mean = 0.0;  // naive baseline in raw target units
  double validation_mase = 0.0;
  int best_epoch = -1;

  int dims() const { return static_cast<int>(cores.size()); }
  int mode_size(int k) const { return static_cast<int>(cores[k].size()); }
  int left_rank(int k) const { return static_cast<int>(cores[k][0].rows()); }
  int right_rank(int k) const { return static_cast<int>(cores[k][0].cols()); }
};

// Contraction G_1[:, i_1, :] ... G_N[:, i_N, :] collapsed to a scalar. This is
// the standardized-space output; predict_tt de-standardizes.
double tt_forward(const TTModel& m, const Eigen::VectorXi& idx);

// Gradient of 0.5 (tt_forward - y)^2 with respect to the touched slice of
// each core, via cached left/right partial products. grads[k] matches the
// shape of cores[k][idx(k)].
std::vector<Eigen::MatrixXd> tt_gradient(const TTModel& m,
                                         const Eigen::VectorXi& idx,
                                         double residual);

// Mini-batch Adam on the train split; returns the epoch checkpoint with the
// best validation score (early selection, not early stopping).
TTModel fit_tt(const Dataset& d, const FeatureOrder& order,
               const DiscretizerSpec& discretizer, Kqi target,
               const TrainConfig& cfg);

double predict_tt(const TTModel& m, const Sample& x);

// JSON header at <base>.json plus a little-endian float64 core blob at
// <base>.bin; the round trip is bit exact.
void save_tt(const TTModel& m, const std::string& base_path);
TTModel load_tt(const std::string& base_path);

}  // namespace qoeopt
