// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/objective.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace qoeopt {

void ObjectiveSpec::validate() const {
  if (alpha < 0.0 || alpha > 1.0) {
    throw Error(Errc::config_error, "alpha must be in [0, 1]");
  }
  const double wsum = service_weights[0] + service_weights[1] + service_weights[2];
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw Error(Errc::config_error, "service weights must sum to 1");
  }
  if (prb_min < 1 || prb_max > 106 || prb_min > prb_max) {
    throw Error(Errc::config_error, "prb domain must lie within {1,...,106}");
  }
  if (resolution_values.empty() || fps_values.empty()) {
    throw Error(Errc::config_error, "empty decision domain");
  }
}

double KqiPredictor::freeze(const DecisionPoint&) const {
  return std::numeric_limits<double>::quiet_NaN();
}

double service_cost(const ObjectiveSpec& spec, int res, int min_res,
                    double efps, double latency) {
  if (!(efps >= 0.0) || !(latency >= 0.0)) {
    throw Error(Errc::domain_error, "efps and latency must be non-negative");
  }
  const double res_term =
      1.0 / (1.0 + std::exp(-static_cast<double>(res - min_res)));
  const double efps_term = 1.0 - std::exp(-efps / spec.efps_scale);
  const double latency_term =
      std::exp(-spec.latency_exponent_coeff * (latency / spec.latency_scale));
  return spec.service_weights[0] * res_term +
         spec.service_weights[1] * efps_term +
         spec.service_weights[2] * latency_term;
}

double network_cost(const ObjectiveSpec& spec, int prb) {
  if (prb < spec.prb_min || prb > spec.prb_max) {
    throw Error(Errc::domain_error,
                "prb outside configured domain: " + std::to_string(prb));
  }
  return 1.0 /
         (1.0 + std::exp(-(static_cast<double>(prb) - spec.prb_midpoint) /
                         spec.prb_slope));
}

double objective(const ObjectiveSpec& spec, const KqiPredictor& pred,
                 const DecisionPoint& p) {
  // slightly negative regressor output would poison F_S's domain
  const double efps_hat = std::max(0.0, pred.efps(p));
  const double latency_hat = std::max(0.0, pred.latency(p));
  const double fs =
      service_cost(spec, p.resolution, spec.min_res, efps_hat, latency_hat);
  const double fn = network_cost(spec, p.prb);
  const double network_term = spec.literal_network_term ? fn : 1.0 - fn;
  return spec.alpha * fs + (1.0 - spec.alpha) * network_term;
}

Grid build_decision_grid(const ObjectiveSpec& spec) {
  spec.validate();
  Grid g;
  GridDim prb{"PRBs", {}};
  for (int v = spec.prb_min; v <= spec.prb_max; ++v) {
    prb.values.push_back(static_cast<double>(v));
  }
  GridDim res{"Resolution", {}};
  for (int v : spec.resolution_values) res.values.push_back(static_cast<double>(v));
  GridDim fps{"FPS", spec.fps_values};
  g.dims = {std::move(prb), std::move(res), std::move(fps)};
  g.validate();
  return g;
}

DecisionPoint decision_from_index(const Grid& grid,
                                  const std::vector<int>& idx) {
  DecisionPoint p;
  p.prb = static_cast<int>(grid.dims[0].values[static_cast<size_t>(idx[0])]);
  p.resolution =
      static_cast<int>(grid.dims[1].values[static_cast<size_t>(idx[1])]);
  p.fps = grid.dims[2].values[static_cast<size_t>(idx[2])];
  return p;
}

ObjectiveFn make_objective_fn(const ObjectiveSpec& spec,
                              const KqiPredictor& pred, const Grid& grid) {
  return [&spec, &pred, &grid](const std::vector<int>& idx) {
    return objective(spec, pred, decision_from_index(grid, idx));
  };
}

std::map<std::string, double> default_frozen_conditions() {
  return {{feat::ping_avg, 30.0}, {feat::rsrp, -95.0}, {feat::sinr, 18.0},
          {feat::rsrq, -10.0},    {feat::rssi, -80.0}, {feat::ping_host_loss, 0.01}};
}

SyntheticKqiPredictor::SyntheticKqiPredictor(
    std::map<std::string, double> frozen) {
  const std::vector<std::string> names = default_feature_names();
  base_.resize(static_cast<int>(names.size()));
  for (size_t i = 0; i < names.size(); ++i) {
    const auto it = frozen.find(names[i]);
    base_(static_cast<int>(i)) = it != frozen.end() ? it->second : 0.0;
  }
}

Eigen::Vector3d SyntheticKqiPredictor::targets_at(const DecisionPoint& p) const {
  Eigen::VectorXd x = base_;
  x(0) = p.fps;
  x(2) = static_cast<double>(p.resolution);
  x(8) = static_cast<double>(p.prb);
  return synthetic_targets(x);
}

double SyntheticKqiPredictor::latency(const DecisionPoint& p) const {
  return targets_at(p)(static_cast<int>(Kqi::latency));
}

double SyntheticKqiPredictor::efps(const DecisionPoint& p) const {
  return targets_at(p)(static_cast<int>(Kqi::efps));
}

double SyntheticKqiPredictor::freeze(const DecisionPoint& p) const {
  return targets_at(p)(static_cast<int>(Kqi::freeze));
}

// Precomputed fast path: the frozen conditions are scaled/discretized once,
// only the three decision coordinates get patched per call.
struct ModelKqiPredictor::Slot {
  std::optional<EnsembleModel> ens;
  std::optional<TTModel> tt;
  Eigen::VectorXd base_scaled;
  Eigen::VectorXi base_idx;
  int pos_prb = -1;
  int pos_res = -1;
  int pos_fps = -1;

  void init(const std::map<std::string, double>& frozen,
            const std::vector<std::string>& features,
            const std::function<double(int, double)>& encode_feature) {
    const int f = static_cast<int>(features.size());
    base_scaled.resize(f);
    base_idx.resize(f);
    for (int i = 0; i < f; ++i) {
      const std::string& name = features[i];
      if (name == feat::prbs) {
        pos_prb = i;
        continue;
      }
      if (name == feat::resolution) {
        pos_res = i;
        continue;
      }
      if (name == feat::fps) {
        pos_fps = i;
        continue;
      }
      const auto it = frozen.find(name);
      if (it == frozen.end()) {
        throw Error(Errc::config_error,
                    "no frozen network-condition value for feature: " + name);
      }
      const double enc = encode_feature(i, it->second);
      base_scaled(i) = enc;
      base_idx(i) = static_cast<int>(enc);
    }
  }

  double predict(const DecisionPoint& p) const {
    if (ens) {
      Eigen::VectorXd x = base_scaled;
      if (pos_prb >= 0) x(pos_prb) = scale_value(ens->scaler, pos_prb, p.prb);
      if (pos_res >= 0) {
        x(pos_res) = scale_value(ens->scaler, pos_res, p.resolution);
      }
      if (pos_fps >= 0) x(pos_fps) = scale_value(ens->scaler, pos_fps, p.fps);
      return ens->predict_scaled(x);
    }
    Eigen::VectorXi idx = base_idx;
    if (pos_prb >= 0) {
      idx(pos_prb) = discretize_value(tt->discretizer, pos_prb, p.prb);
    }
    if (pos_res >= 0) {
      idx(pos_res) = discretize_value(tt->discretizer, pos_res, p.resolution);
    }
    if (pos_fps >= 0) {
      idx(pos_fps) = discretize_value(tt->discretizer, pos_fps, p.fps);
    }
    return tt_forward(*tt, idx) * tt->target_std + tt->target_mean;
  }
};

ModelKqiPredictor::ModelKqiPredictor(std::map<std::string, double> frozen)
    : frozen_(std::move(frozen)), slots_(kNumKqis) {}

void ModelKqiPredictor::set_model(Kqi target, EnsembleModel model) {
  auto slot = std::make_shared<Slot>();
  slot->ens = std::move(model);
  const ScalerSpec& s = slot->ens->scaler;
  slot->init(frozen_, s.features, [&s](int i, double v) {
    return scale_value(s, i, v);
  });
  slots_[static_cast<size_t>(target)] = std::move(slot);
}

void ModelKqiPredictor::set_model(Kqi target, TTModel model) {
  auto slot = std::make_shared<Slot>();
  slot->tt = std::move(model);
  const DiscretizerSpec& s = slot->tt->discretizer;
  slot->init(frozen_, s.features, [&s](int i, double v) {
    return static_cast<double>(discretize_value(s, i, v));
  });
  slots_[static_cast<size_t>(target)] = std::move(slot);
}

bool ModelKqiPredictor::has_model(Kqi target) const {
  return slots_[static_cast<size_t>(target)] != nullptr;
}

double ModelKqiPredictor::predict(Kqi target, const DecisionPoint& p) const {
  const auto& slot = slots_[static_cast<size_t>(target)];
  if (!slot) {
    throw Error(Errc::missing_model,
                std::string("no model loaded for KQI: ") + kqi_name(target));
  }
  return slot->predict(p);
}

double ModelKqiPredictor::latency(const DecisionPoint& p) const {
  return predict(Kqi::latency, p);
}

double ModelKqiPredictor::efps(const DecisionPoint& p) const {
  return predict(Kqi::efps, p);
}

double ModelKqiPredictor::freeze(const DecisionPoint& p) const {
  if (!has_model(Kqi::freeze)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return predict(Kqi::freeze, p);
}

}  // namespace qoeopt
