// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>

#include "qoeopt/error.hpp"

namespace qoeopt {

struct MaseReport {
  double mase = 0.0;
  double model_mae = 0.0;
  double naive_mae = 0.0;
  int n = 0;
};

// mase = mean|pred - actual| / mean|naive - actual|. The naive baseline for
// this cross-sectional data is the constant train-split target mean.
MaseReport mase(Eigen::Ref<const Eigen::VectorXd> predictions,
                Eigen::Ref<const Eigen::VectorXd> actuals,
                Eigen::Ref<const Eigen::VectorXd> naive);

MaseReport mase_constant_baseline(Eigen::Ref<const Eigen::VectorXd> predictions,
                                  Eigen::Ref<const Eigen::VectorXd> actuals,
                                  double baseline);

struct TimingReport {
  double load_ms = 0.0;
  double load_std_ms = 0.0;
  double infer_ms = 0.0;
  double infer_std_ms = 0.0;
  int runs = 0;
  int test_set_size = 0;
  bool low_confidence = false;  // single-run report
};

// Wall-clock means over `runs` repetitions of (deserialize, infer over the
// whole test set). Runs sequentially on the calling thread so timings stay
// comparable; excludes process start-up.
TimingReport time_model(const std::function<void()>& load,
                        const std::function<void()>& infer, int runs,
                        int test_set_size);

}  // namespace qoeopt
