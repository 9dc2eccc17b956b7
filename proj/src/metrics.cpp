// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/metrics.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace qoeopt {

MaseReport mase(Eigen::Ref<const Eigen::VectorXd> predictions,
                Eigen::Ref<const Eigen::VectorXd> actuals,
                Eigen::Ref<const Eigen::VectorXd> naive) {
  const int n = static_cast<int>(actuals.size());
  if (n < 1 || predictions.size() != n || naive.size() != n) {
    throw Error(Errc::invalid_value, "series must have equal length >= 1");
  }
  MaseReport r;
  r.n = n;
  r.model_mae = (predictions - actuals).cwiseAbs().mean();
  r.naive_mae = (naive - actuals).cwiseAbs().mean();
  if (r.naive_mae == 0.0) {
    throw Error(Errc::undefined_baseline,
                "naive baseline has zero error (constant targets)");
  }
  r.mase = r.model_mae / r.naive_mae;
  return r;
}

MaseReport mase_constant_baseline(Eigen::Ref<const Eigen::VectorXd> predictions,
                                  Eigen::Ref<const Eigen::VectorXd> actuals,
                                  double baseline) {
  const Eigen::VectorXd naive =
      Eigen::VectorXd::Constant(actuals.size(), baseline);
  return mase(predictions, actuals, naive);
}

TimingReport time_model(const std::function<void()>& load,
                        const std::function<void()>& infer, int runs,
                        int test_set_size) {
  if (runs < 1) throw Error(Errc::invalid_value, "need runs >= 1");

  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  double load_sum = 0.0, load_sq = 0.0, infer_sum = 0.0, infer_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    try {
      auto t0 = Clock::now();
      load();
      const double lt = ms_since(t0);
      t0 = Clock::now();
      infer();
      const double it = ms_since(t0);
      load_sum += lt;
      load_sq += lt * lt;
      infer_sum += it;
      infer_sq += it * it;
    } catch (const std::exception& e) {
      throw Error(Errc::io_error, "timing run " + std::to_string(r) +
                                      " failed: " + e.what());
    }
  }

  TimingReport rep;
  rep.runs = runs;
  rep.test_set_size = test_set_size;
  rep.load_ms = load_sum / runs;
  rep.infer_ms = infer_sum / runs;
  if (runs > 1) {
    rep.load_std_ms = std::sqrt(
        std::max(0.0, (load_sq - runs * rep.load_ms * rep.load_ms) / (runs - 1)));
    rep.infer_std_ms = std::sqrt(std::max(
        0.0, (infer_sq - runs * rep.infer_ms * rep.infer_ms) / (runs - 1)));
  }
  rep.low_confidence = (runs == 1);
  return rep;
}

}  // namespace qoeopt
