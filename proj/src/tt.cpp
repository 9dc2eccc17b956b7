// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/tt.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "qoeopt/metrics.hpp"
#include "qoeopt/rng.hpp"

namespace qoeopt {

namespace {

void check_index(const TTModel& m, const Eigen::VectorXi& idx) {
  if (idx.size() != m.dims()) {
    throw Error(Errc::index_error, "index arity mismatch");
  }
  for (int k = 0; k < m.dims(); ++k) {
    if (idx(k) < 0 || idx(k) >= m.mode_size(k)) {
      throw Error(Errc::index_error,
                  "index out of range for feature " + m.order.order[k]);
    }
  }
}

}  // namespace

double tt_forward(const TTModel& m, const Eigen::VectorXi& idx) {
  check_index(m, idx);
  Eigen::RowVectorXd acc = m.cores[0][idx(0)].row(0);
  for (int k = 1; k < m.dims(); ++k) {
    acc = acc * m.cores[k][idx(k)];
  }
  return acc(0);
}

std::vector<Eigen::MatrixXd> tt_gradient(const TTModel& m,
                                         const Eigen::VectorXi& idx,
                                         double residual) {
  check_index(m, idx);
  const int n = m.dims();

  // prefix[k]: product of slices 0..k-1 (1 x left_rank(k)); prefix[n] scalar
  std::vector<Eigen::RowVectorXd> prefix(n + 1);
  prefix[0] = Eigen::RowVectorXd::Ones(1);
  for (int k = 0; k < n; ++k) {
    prefix[k + 1] = prefix[k] * m.cores[k][idx(k)];
  }
  // suffix[k]: product of slices k..n-1 (left_rank(k) x 1); suffix[n] scalar
  std::vector<Eigen::VectorXd> suffix(n + 1);
  suffix[n] = Eigen::VectorXd::Ones(1);
  for (int k = n - 1; k >= 0; --k) {
    suffix[k] = m.cores[k][idx(k)] * suffix[k + 1];
  }

  std::vector<Eigen::MatrixXd> grads(n);
  for (int k = 0; k < n; ++k) {
    grads[k] = residual * (prefix[k].transpose() * suffix[k + 1].transpose());
  }
  return grads;
}

TTModel fit_tt(const Dataset& d, const FeatureOrder& order,
               const DiscretizerSpec& discretizer, Kqi target,
               const TrainConfig& cfg) {
  if (cfg.rank < 1 || cfg.epochs < 1 || cfg.batch_size < 1) {
    throw Error(Errc::config_error, "rank, epochs and batch size must be >= 1");
  }
  if (!d.has_splits()) {
    throw Error(Errc::invalid_value, "dataset needs split tags");
  }
  const std::vector<int> train_rows = d.split_rows(Split::train);
  const std::vector<int> val_rows = d.split_rows(Split::val);
  if (train_rows.empty()) throw Error(Errc::empty_input, "empty train split");

  TTModel m;
  m.order = order;
  m.discretizer = subset_discretizer(discretizer, order.order);
  m.target = target;

  const int ndims = static_cast<int>(order.order.size());
  std::vector<int> cols(ndims);
  for (int k = 0; k < ndims; ++k) {
    cols[k] = d.feature_index(order.order[k]);
    if (cols[k] < 0) {
      throw Error(Errc::schema_error, "unknown feature: " + order.order[k]);
    }
  }

  auto discretize_rows = [&](const std::vector<int>& rows) {
    Eigen::MatrixXi out(static_cast<int>(rows.size()), ndims);
    for (size_t i = 0; i < rows.size(); ++i) {
      for (int k = 0; k < ndims; ++k) {
        out(static_cast<int>(i), k) =
            discretize_value(m.discretizer, k, d.features()(rows[i], cols[k]));
      }
    }
    return out;
  };
  const Eigen::MatrixXi x_train = discretize_rows(train_rows);
  const Eigen::MatrixXi x_val = discretize_rows(val_rows);

  const int n_train = static_cast<int>(train_rows.size());
  Eigen::VectorXd y_raw(n_train);
  for (int i = 0; i < n_train; ++i) {
    y_raw(i) = d.targets()(train_rows[i], static_cast<int>(target));
  }
  m.train_mean = y_raw.mean();
  m.target_mean = m.train_mean;
  const double var = (y_raw.array() - m.target_mean).square().mean();
  m.target_std = var > 0.0 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd y = (y_raw.array() - m.target_mean) / m.target_std;

  Eigen::VectorXd y_val(static_cast<int>(val_rows.size()));
  for (size_t i = 0; i < val_rows.size(); ++i) {
    y_val(static_cast<int>(i)) =
        d.targets()(val_rows[i], static_cast<int>(target));
  }

  // boundary-capped ranks
  std::vector<int> ranks(ndims + 1, 1);
  for (int k = 1; k < ndims; ++k) {
    long left = 1, right = 1;
    for (int j = 0; j < k; ++j) left = std::min<long>(left * m.discretizer.n_vals(j), 1 << 20);
    for (int j = k; j < ndims; ++j) right = std::min<long>(right * m.discretizer.n_vals(j), 1 << 20);
    ranks[k] = static_cast<int>(std::min<long>({cfg.rank, left, right}));
  }

  // Every slice of a core starts as one shared random map plus an i.i.d.
  // Gaussian perturbation of scale init_scale/sqrt(rank). Fully independent
  // slices leave features the target never uses acting as per-sample
  // multiplicative noise, and validation error then never drops below the
  // naive baseline.
  Rng rng(cfg.seed);
  const double sdev = cfg.init_scale / std::sqrt(static_cast<double>(cfg.rank));
  m.cores.resize(ndims);
  for (int k = 0; k < ndims; ++k) {
    Eigen::MatrixXd base(ranks[k], ranks[k + 1]);
    const double bscale = 1.0 / std::sqrt(static_cast<double>(ranks[k]));
    for (int a = 0; a < base.rows(); ++a) {
      for (int b = 0; b < base.cols(); ++b) base(a, b) = bscale * rng.normal();
    }
    m.cores[k].resize(m.discretizer.n_vals(k));
    for (int j = 0; j < m.discretizer.n_vals(k); ++j) {
      Eigen::MatrixXd slice = base;
      for (int a = 0; a < slice.rows(); ++a) {
        for (int b = 0; b < slice.cols(); ++b) slice(a, b) += sdev * rng.normal();
      }
      m.cores[k][j] = std::move(slice);
    }
  }

  auto zeros_like = [&]() {
    std::vector<std::vector<Eigen::MatrixXd>> z(ndims);
    for (int k = 0; k < ndims; ++k) {
      z[k].assign(m.cores[k].size(),
                  Eigen::MatrixXd::Zero(ranks[k], ranks[k + 1]));
    }
    return z;
  };
  auto grad = zeros_like();
  auto adam_m = zeros_like();
  auto adam_v = zeros_like();

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;

  std::vector<Eigen::RowVectorXd> prefix(ndims + 1);
  std::vector<Eigen::VectorXd> suffix(ndims + 1);
  for (int k = 0; k <= ndims; ++k) {
    prefix[k].resize(ranks[k]);
    suffix[k].resize(ranks[k]);
  }

  auto forward_idx = [&](const Eigen::MatrixXi& x, int row) {
    Eigen::RowVectorXd acc = m.cores[0][x(row, 0)].row(0);
    for (int k = 1; k < ndims; ++k) acc = acc * m.cores[k][x(row, k)];
    return acc(0);
  };

  std::vector<std::vector<Eigen::MatrixXd>> best_cores;
  double best_metric = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  double best_val_mase = std::numeric_limits<double>::quiet_NaN();

  std::vector<int> perm(n_train);
  for (int i = 0; i < n_train; ++i) perm[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(perm);
    double epoch_loss = 0.0;

    for (int start = 0; start < n_train; start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, n_train);
      const int bsz = stop - start;

      for (int k = 0; k < ndims; ++k) {
        for (auto& g : grad[k]) g.setZero();
      }

      for (int b = start; b < stop; ++b) {
        const int row = perm[b];
        prefix[0] = Eigen::RowVectorXd::Ones(1);
        for (int k = 0; k < ndims; ++k) {
          prefix[k + 1].noalias() = prefix[k] * m.cores[k][x_train(row, k)];
        }
        suffix[ndims] = Eigen::VectorXd::Ones(1);
        for (int k = ndims - 1; k >= 0; --k) {
          suffix[k].noalias() = m.cores[k][x_train(row, k)] * suffix[k + 1];
        }
        const double residual = prefix[ndims](0) - y(row);
        epoch_loss += 0.5 * residual * residual;
        for (int k = 0; k < ndims; ++k) {
          grad[k][x_train(row, k)].noalias() +=
              residual * (prefix[k].transpose() * suffix[k + 1].transpose());
        }
      }

      double sq_norm = 0.0;
      for (int k = 0; k < ndims; ++k) {
        for (auto& g : grad[k]) {
          g /= static_cast<double>(bsz);
          sq_norm += g.squaredNorm();
        }
      }
      const double norm = std::sqrt(sq_norm);
      const double scale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;

      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (int k = 0; k < ndims; ++k) {
        for (size_t j = 0; j < m.cores[k].size(); ++j) {
          const Eigen::ArrayXXd g = grad[k][j].array() * scale;
          adam_m[k][j].array() = beta1 * adam_m[k][j].array() + (1.0 - beta1) * g;
          adam_v[k][j].array() =
              beta2 * adam_v[k][j].array() + (1.0 - beta2) * g.square();
          m.cores[k][j].array() -=
              cfg.learning_rate * (adam_m[k][j].array() / bc1) /
              ((adam_v[k][j].array() / bc2).sqrt() + eps);
        }
      }
    }

    if (!std::isfinite(epoch_loss)) {
      throw Error(Errc::training_diverged,
                  "training diverged at epoch " + std::to_string(epoch));
    }

    // epoch checkpoint selection on the validation split
    double metric;
    double val_mase = std::numeric_limits<double>::quiet_NaN();
    if (x_val.rows() > 0) {
      Eigen::VectorXd pred(x_val.rows());
      for (int i = 0; i < x_val.rows(); ++i) {
        pred(i) = forward_idx(x_val, i) * m.target_std + m.target_mean;
      }
      const double model_mae = (pred - y_val).cwiseAbs().mean();
      const double naive_mae = (y_val.array() - m.train_mean).abs().mean();
      if (naive_mae > 0.0) {
        val_mase = model_mae / naive_mae;
        metric = val_mase;
      } else {
        metric = model_mae;
      }
    } else {
      metric = epoch_loss / n_train;
    }
    if (metric < best_metric) {
      best_metric = metric;
      best_cores = m.cores;
      best_epoch = epoch;
      best_val_mase = val_mase;
    }
  }

  m.cores = std::move(best_cores);
  m.best_epoch = best_epoch;
  m.validation_mase = best_val_mase;
  return m;
}

double predict_tt(const TTModel& m, const Sample& x) {
  const Eigen::VectorXi idx = discretize(m.discretizer, x);
  return tt_forward(m, idx) * m.target_std + m.target_mean;
}

void save_tt(const TTModel& m, const std::string& base_path) {
  nlohmann::json j;
  j["format"] = "qoeopt-tt-v1";
  j["target"] = kqi_name(m.target);
  j["order"] = m.order.order;
  j["center_out"] = m.order.center_out;
  j["discretizer"] = {
      {"features", m.discretizer.features},
      {"x_min", std::vector<double>(m.discretizer.x_min.data(),
                                    m.discretizer.x_min.data() +
                                        m.discretizer.x_min.size())},
      {"x_max", std::vector<double>(m.discretizer.x_max.data(),
                                    m.discretizer.x_max.data() +
                                        m.discretizer.x_max.size())},
      {"n_vals", std::vector<int>(m.discretizer.n_vals.data(),
                                  m.discretizer.n_vals.data() +
                                      m.discretizer.n_vals.size())}};
  std::vector<int> ranks;
  for (int k = 0; k < m.dims(); ++k) ranks.push_back(m.left_rank(k));
  ranks.push_back(m.dims() > 0 ? m.right_rank(m.dims() - 1) : 1);
  j["ranks"] = ranks;
  j["target_mean"] = m.target_mean;
  j["target_std"] = m.target_std;
  j["train_mean"] = m.train_mean;
  j["validation_mase"] = m.validation_mase;
  j["best_epoch"] = m.best_epoch;

  long n_doubles = 0;
  for (int k = 0; k < m.dims(); ++k) {
    n_doubles += static_cast<long>(m.mode_size(k)) * m.left_rank(k) *
                 m.right_rank(k);
  }
  j["blob_doubles"] = n_doubles;

  std::ofstream hdr(base_path + ".json", std::ios::binary);
  if (!hdr) throw Error(Errc::io_error, "cannot write " + base_path + ".json");
  hdr << j.dump(2) << '\n';

  std::ofstream blob(base_path + ".bin", std::ios::binary);
  if (!blob) throw Error(Errc::io_error, "cannot write " + base_path + ".bin");
  for (int k = 0; k < m.dims(); ++k) {
    for (const auto& slice : m.cores[k]) {
      blob.write(reinterpret_cast<const char*>(slice.data()),
                 static_cast<std::streamsize>(sizeof(double) * slice.size()));
    }
  }
}

TTModel load_tt(const std::string& base_path) {
  std::ifstream hdr(base_path + ".json");
  if (!hdr) throw Error(Errc::io_error, "cannot open " + base_path + ".json");
  nlohmann::json j;
  hdr >> j;
  if (j.value("format", "") != "qoeopt-tt-v1") {
    throw Error(Errc::io_error, "not a tt model: " + base_path);
  }

  TTModel m;
  m.target = kqi_from_name(j.at("target").get<std::string>());
  m.order.order = j.at("order").get<std::vector<std::string>>();
  m.order.center_out = j.at("center_out").get<bool>();
  m.discretizer.features =
      j.at("discretizer").at("features").get<std::vector<std::string>>();
  const auto lo = j.at("discretizer").at("x_min").get<std::vector<double>>();
  const auto hi = j.at("discretizer").at("x_max").get<std::vector<double>>();
  const auto nv = j.at("discretizer").at("n_vals").get<std::vector<int>>();
  m.discretizer.x_min =
      Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<int>(lo.size()));
  m.discretizer.x_max =
      Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<int>(hi.size()));
  m.discretizer.n_vals =
      Eigen::Map<const Eigen::VectorXi>(nv.data(), static_cast<int>(nv.size()));
  const auto ranks = j.at("ranks").get<std::vector<int>>();
  m.target_mean = j.at("target_mean").get<double>();
  m.target_std = j.at("target_std").get<double>();
  m.train_mean = j.at("train_mean").get<double>();
  m.validation_mase = j.at("validation_mase").is_null()
                          ? std::numeric_limits<double>::quiet_NaN()
                          : j.at("validation_mase").get<double>();
  m.best_epoch = j.at("best_epoch").get<int>();

  std::ifstream blob(base_path + ".bin", std::ios::binary);
  if (!blob) throw Error(Errc::io_error, "cannot open " + base_path + ".bin");
  const int ndims = static_cast<int>(m.discretizer.n_vals.size());
  m.cores.resize(ndims);
  for (int k = 0; k < ndims; ++k) {
    m.cores[k].resize(m.discretizer.n_vals(k));
    for (auto& slice : m.cores[k]) {
      slice.resize(ranks[k], ranks[k + 1]);
      blob.read(reinterpret_cast<char*>(slice.data()),
                static_cast<std::streamsize>(sizeof(double) * slice.size()));
      if (!blob) throw Error(Errc::io_error, "truncated core blob");
    }
  }
  return m;
}

}  // namespace qoeopt
