// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qoeopt/dataset.hpp"
#include "qoeopt/ensemble.hpp"
#include "qoeopt/tt.hpp"
#include "qoeopt/ttopt.hpp"

namespace qoeopt {

// Trade-off objective over the (PRB, Resolution, FPS) decision grid.
// The maximized quantity is J = alpha * F_S + (1 - alpha) * (1 - F_N): high
// alpha rewards service quality, low alpha rewards sparing PRB allocation.
// `literal_network_term` switches to the printed form alpha*F_S + (1-alpha)*F_N
// for sensitivity analysis.
struct ObjectiveSpec {
  double alpha = 0.8;
  int min_res = 0;
  double efps_scale = 43.25;
  double latency_scale = 150.0;
  double latency_exponent_coeff = 0.5;
  double service_weights[3] = {0.25, 0.25, 0.5};
  double prb_midpoint = 53.0;
  double prb_slope = 10.0;
  int prb_min = 5;
  int prb_max = 106;
  std::vector<int> resolution_values = {0, 1, 2, 3};
  std::vector<double> fps_values = {30.0, 60.0, 120.0};
  bool literal_network_term = false;

  void validate() const;
};

struct DecisionPoint {
  int prb = 0;
  int resolution = 0;
  double fps = 0.0;
};

// Predicted KQIs at a decision point with the network-condition features
// held fixed. freeze() is reporting-only and may be NaN.
class KqiPredictor {
 public:
  virtual ~KqiPredictor() = default;
  virtual double latency(const DecisionPoint& p) const = 0;
  virtual double efps(const DecisionPoint& p) const = 0;
  virtual double freeze(const DecisionPoint& p) const;
};

// F_S: sigmoid resolution reward + saturating efps reward + decaying latency
// reward, weighted (0.25, 0.25, 0.5); strictly inside (0, 1)
double service_cost(const ObjectiveSpec& spec, int res, int min_res,
                    double efps, double latency);

// F_N: logistic PRB load, midpoint 53, slope 10
double network_cost(const ObjectiveSpec& spec, int prb);

double objective(const ObjectiveSpec& spec, const KqiPredictor& pred,
                 const DecisionPoint& p);

// dims: PRBs (prb_min..prb_max) x Resolution x FPS. MinRes is enforced softly
// inside F_S, never by pruning the grid.
Grid build_decision_grid(const ObjectiveSpec& spec);

DecisionPoint decision_from_index(const Grid& grid, const std::vector<int>& idx);

ObjectiveFn make_objective_fn(const ObjectiveSpec& spec,
                              const KqiPredictor& pred, const Grid& grid);

// Frozen network conditions used when none are configured.
std::map<std::string, double> default_frozen_conditions();

// Fixture predictor backed by the synthetic generator's ground truth.
class SyntheticKqiPredictor : public KqiPredictor {
 public:
  explicit SyntheticKqiPredictor(
      std::map<std::string, double> frozen = default_frozen_conditions());

  double latency(const DecisionPoint& p) const override;
  double efps(const DecisionPoint& p) const override;
  double freeze(const DecisionPoint& p) const override;

 private:
  Eigen::Vector3d targets_at(const DecisionPoint& p) const;
  Eigen::VectorXd base_;  // canonical feature order
};

// Predictor over trained models (one per KQI), any mix of model families.
class ModelKqiPredictor : public KqiPredictor {
 public:
  ModelKqiPredictor(std::map<std::string, double> frozen);

  void set_model(Kqi target, EnsembleModel model);
  void set_model(Kqi target, TTModel model);
  bool has_model(Kqi target) const;

  double latency(const DecisionPoint& p) const override;
  double efps(const DecisionPoint& p) const override;
  double freeze(const DecisionPoint& p) const override;

 private:
  struct Slot;
  double predict(Kqi target, const DecisionPoint& p) const;

  std::map<std::string, double> frozen_;
  std::vector<std::shared_ptr<Slot>> slots_;
};

}  // namespace qoeopt
