// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "qoeopt/dataset.hpp"
#include "qoeopt/rng.hpp"

namespace qoeopt {

// Ground truth "synth-v1", committed in README.md. Every target is a sum of
// univariate terms of the features; Latency decreases in PRBs, EFPS increases
// in FPS and PRBs, Freeze increases in Ping avg and Ping Host Loss.
const char* const kSyntheticVersion = "synth-v1";

namespace {

// noise is expressed as a multiple of these per-target scales
constexpr double kNoiseScale[kNumKqis] = {20.0, 0.04, 8.0};

constexpr int kFpsChoices[3] = {30, 60, 120};

}  // namespace

Eigen::Vector3d synthetic_targets(const Eigen::VectorXd& features) {
  // canonical order: FPS, Ping avg, Resolution, RSRP, SINR, RSRQ, RSSI,
  // Ping Host Loss, PRBs
  const double fps = features(0);
  const double ping = features(1);
  const double res = features(2);
  const double sinr = features(4);
  const double loss = features(7);
  const double prb = features(8);

  Eigen::Vector3d y;
  y(0) = 20.0 + 0.9 * ping + 2600.0 / (prb + 15.0) + 6.0 * res +
         0.4 * (30.0 - sinr) - 0.03 * fps;
  y(1) = 0.0015 * ping + 3.0 * loss + 0.05 * std::exp(-(prb - 5.0) / 40.0) +
         0.005 * res;
  y(2) = 0.82 * fps + 16.0 * (1.0 - std::exp(-(prb - 5.0) / 30.0)) -
         0.06 * ping - 1.5 * res;
  return y;
}

Dataset generate_synthetic(int n, uint64_t seed, double noise) {
  if (n < 1) throw Error(Errc::invalid_value, "need n >= 1");

  const std::vector<std::string> names = default_feature_names();
  Eigen::MatrixXd x(n, static_cast<int>(names.size()));
  Eigen::MatrixXd y(n, kNumKqis);

  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(kFpsChoices[rng.uniform_int(3)]);
    x(i, 1) = rng.uniform(5.0, 100.0);
    x(i, 2) = static_cast<double>(rng.uniform_int(4));
    x(i, 3) = rng.uniform(-120.0, -70.0);
    x(i, 4) = rng.uniform(0.0, 30.0);
    x(i, 5) = rng.uniform(-20.0, -3.0);
    x(i, 6) = rng.uniform(-100.0, -60.0);
    x(i, 7) = rng.uniform(0.0, 0.05);
    x(i, 8) = static_cast<double>(5 + rng.uniform_int(102));

    Eigen::Vector3d t = synthetic_targets(x.row(i).transpose());
    if (noise > 0.0) {
      for (int k = 0; k < kNumKqis; ++k) {
        t(k) += noise * kNoiseScale[k] * rng.normal();
      }
    }
    // targets stay non-negative under noise
    y.row(i) = t.cwiseMax(0.0).transpose();
  }

  Dataset d(names, std::move(x), std::move(y));
  d.provenance.synthetic_seed = seed;
  return d;
}

}  // namespace qoeopt
