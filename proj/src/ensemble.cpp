// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "qoeopt/metrics.hpp"
#include "qoeopt/rng.hpp"

namespace qoeopt {

WeakLearnerPool train_pool(const Eigen::MatrixXd& x_scaled,
                           const Eigen::VectorXd& y, int k, uint64_t seed) {
  if (k < 1) throw Error(Errc::invalid_value, "need at least one learner");
  const int n = static_cast<int>(x_scaled.rows());
  const int f = static_cast<int>(x_scaled.cols());
  if (n < 2) {
    throw Error(Errc::too_small, "degenerate train split for pool training");
  }

  const int subset_size =
      std::min(f, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(f)))));
  const int min_leaf = n >= 20 ? 5 : 1;

  WeakLearnerPool pool;
  for (int t = 0; t < k; ++t) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));

    std::vector<int> boot(n);
    for (int i = 0; i < n; ++i) boot[i] = rng.uniform_int(n);

    // distinct random feature subset
    std::vector<int> all(f);
    for (int i = 0; i < f; ++i) all[i] = i;
    rng.shuffle(all);
    std::vector<int> subset(all.begin(), all.begin() + subset_size);
    std::sort(subset.begin(), subset.end());

    pool.learners.push_back(
        RegressionTree::fit(x_scaled, y, boot, subset, 3, min_leaf));
    pool.feature_subsets.push_back(std::move(subset));
  }
  return pool;
}

Eigen::MatrixXd pool_predictions(const WeakLearnerPool& pool,
                                 const Eigen::MatrixXd& x_scaled) {
  Eigen::MatrixXd h(x_scaled.rows(), pool.size());
  for (int t = 0; t < pool.size(); ++t) {
    h.col(t) = pool.learners[t].predict_rows(x_scaled);
  }
  return h;
}

QuboProblem build_qubo(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                       const WeightEncoding& enc, double lambda) {
  if (lambda < 0.0) throw Error(Errc::invalid_value, "lambda must be >= 0");
  const int k = static_cast<int>(h.cols());
  const int b = enc.bits;
  if (b < 1) throw Error(Errc::invalid_value, "need at least 1 bit per weight");
  const int nvars = k * b;
  const double step = enc.step();

  // Gram terms over learner predictions
  const Eigen::MatrixXd gram = h.transpose() * h;        // K x K
  const Eigen::VectorXd hy = h.transpose() * y;          // K
  const Eigen::VectorXd hsum = gram.rowwise().sum();     // sum_j G_ij

  // With w_i = w_min + step * sum_b 2^b q_{i,b} and c_n = y_n - w_min sum_j h_j,
  // the squared loss expands over a_{(i,b),n} = step 2^b h_i(x_n):
  //   L = sum c_n^2 - 2 sum_p (sum_n c_n a_pn) q_p + sum_pp' (sum_n a_pn a_p'n) q_p q_p'
  QuboProblem p;
  p.q = Eigen::MatrixXd::Zero(nvars, nvars);
  p.offset = y.squaredNorm() - 2.0 * enc.w_min * hy.sum() +
             enc.w_min * enc.w_min * gram.sum();

  auto var = [b](int learner, int bit) { return learner * b + bit; };

  for (int i = 0; i < k; ++i) {
    const double cy_i = hy(i) - enc.w_min * hsum(i);  // sum_n c_n h_i(x_n)
    for (int bi = 0; bi < b; ++bi) {
      const double ai = step * static_cast<double>(1 << bi);
      const int pi = var(i, bi);
      // diagonal folds the linear term since q^2 = q
      p.q(pi, pi) = ai * ai * gram(i, i) - 2.0 * ai * cy_i + lambda;
      for (int j = 0; j < k; ++j) {
        for (int bj = 0; bj < b; ++bj) {
          const int pj = var(j, bj);
          if (pj == pi) continue;
          const double aj = step * static_cast<double>(1 << bj);
          p.q(pi, pj) = ai * aj * gram(i, j);
        }
      }
    }
  }
  return p;
}

Eigen::VectorXd decode_weights(const std::vector<uint8_t>& bits,
                               const WeightEncoding& enc, int k) {
  if (static_cast<int>(bits.size()) != k * enc.bits) {
    throw Error(Errc::invalid_value, "bitstring length mismatch");
  }
  Eigen::VectorXd w(k);
  const double step = enc.step();
  for (int i = 0; i < k; ++i) {
    double code = 0.0;
    for (int b = 0; b < enc.bits; ++b) {
      if (bits[i * enc.bits + b]) code += static_cast<double>(1 << b);
    }
    w(i) = enc.w_min + step * code;
  }
  return w;
}

std::vector<uint8_t> encode_weights(const Eigen::VectorXd& w,
                                    const WeightEncoding& enc) {
  const double step = enc.step();
  const long max_code = (1L << enc.bits) - 1;
  std::vector<uint8_t> bits(static_cast<size_t>(w.size()) * enc.bits, 0);
  for (int i = 0; i < w.size(); ++i) {
    const double clamped = std::clamp(w(i), enc.w_min, enc.w_max);
    const long code =
        std::clamp(std::lround((clamped - enc.w_min) / step), 0L, max_code);
    for (int b = 0; b < enc.bits; ++b) {
      bits[static_cast<size_t>(i) * enc.bits + b] =
          static_cast<uint8_t>((code >> b) & 1L);
    }
  }
  return bits;
}

double EnsembleModel::predict_scaled(
    Eigen::Ref<const Eigen::VectorXd> x_scaled) const {
  double out = 0.0;
  for (int t = 0; t < pool.size(); ++t) {
    out += weights(t) * pool.learners[t].predict(x_scaled);
  }
  return out * target_std + train_mean;
}

double EnsembleModel::predict(const Sample& x) const {
  for (const auto& [name, v] : x.features) {
    if (std::isnan(v)) {
      throw Error(Errc::invalid_value, "NaN feature value: " + name);
    }
  }
  return predict_scaled(apply_scaler(scaler, x));
}

EnsembleModel fit_ensemble(const Dataset& d, Kqi target,
                           const EnsembleConfig& cfg) {
  if (!d.has_splits()) {
    throw Error(Errc::invalid_value, "dataset needs split tags");
  }
  const std::vector<int> train_rows = d.split_rows(Split::train);
  const std::vector<int> val_rows = d.split_rows(Split::val);
  if (train_rows.size() < 2) {
    throw Error(Errc::too_small, "degenerate train split");
  }

  EnsembleModel m;
  m.target = target;
  m.encoding = cfg.encoding;
  m.lambda = cfg.lambda;
  m.seed = cfg.seed;
  m.schedule = cfg.schedule;
  m.scaler = fit_scaler(d, d.feature_names());

  const Eigen::MatrixXd x_train = apply_scaler(m.scaler, d, train_rows);
  const int n_train = static_cast<int>(train_rows.size());
  Eigen::VectorXd y_train(n_train);
  for (size_t i = 0; i < train_rows.size(); ++i) {
    y_train(static_cast<int>(i)) =
        d.targets()(train_rows[i], static_cast<int>(target));
  }
  m.train_mean = y_train.mean();
  const double var = (y_train.array() - m.train_mean).square().mean();
  m.target_std = var > 0.0 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd y_std = (y_train.array() - m.train_mean) / m.target_std;

  m.pool = train_pool(x_train, y_std, cfg.learners, cfg.seed);
  const Eigen::MatrixXd h = pool_predictions(m.pool, x_train);
  // The QUBO is built on 1/sqrt(n)-scaled data with lambda/n: the energies are
  // n times smaller than the summed loss, so the default temperature schedule
  // anneals instead of quenching, while the minimizer is unchanged.
  const double rn = std::sqrt(static_cast<double>(n_train));
  const QuboProblem problem =
      build_qubo(h / rn, y_std / rn, cfg.encoding, cfg.lambda / n_train);
  if (!cfg.qubo_export_path.empty()) {
    save_qubo_text(problem, cfg.qubo_export_path);
  }

  const QuboSolution sol = cfg.solver == QuboSolverKind::exact
                               ? solve_exact(problem)
                               : solve_sa(problem, cfg.schedule, cfg.seed);
  m.weights = decode_weights(sol.bits, cfg.encoding, m.pool.size());

  if (!val_rows.empty()) {
    const Eigen::MatrixXd x_val = apply_scaler(m.scaler, d, val_rows);
    Eigen::VectorXd y_val(static_cast<int>(val_rows.size()));
    Eigen::VectorXd pred(static_cast<int>(val_rows.size()));
    for (size_t i = 0; i < val_rows.size(); ++i) {
      y_val(static_cast<int>(i)) =
          d.targets()(val_rows[i], static_cast<int>(target));
      pred(static_cast<int>(i)) =
          m.predict_scaled(x_val.row(static_cast<int>(i)).transpose());
    }
    const double naive_mae =
        (y_val.array() - m.train_mean).abs().mean();
    if (naive_mae > 0.0) {
      m.validation_mase =
          mase_constant_baseline(pred, y_val, m.train_mean).mase;
    } else {
      m.validation_mase = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    m.validation_mase = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

namespace {

nlohmann::json tree_to_json(const RegressionTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : t.nodes()) {
    nodes.push_back({{"f", n.feature},
                     {"t", n.threshold},
                     {"v", n.value},
                     {"l", n.left},
                     {"r", n.right}});
  }
  return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& nodes) {
  std::vector<TreeNode> out;
  for (const auto& n : nodes) {
    TreeNode node;
    node.feature = n.at("f").get<int>();
    node.threshold = n.at("t").get<double>();
    node.value = n.at("v").get<double>();
    node.left = n.at("l").get<int>();
    node.right = n.at("r").get<int>();
    out.push_back(node);
  }
  return RegressionTree(std::move(out));
}

}  // namespace

void save_ensemble(const EnsembleModel& m, const std::string& path) {
  nlohmann::json j;
  j["format"] = "qoeopt-ensemble-v1";
  j["target"] = kqi_name(m.target);
  j["encoding"] = {{"bits", m.encoding.bits},
                   {"w_min", m.encoding.w_min},
                   {"w_max", m.encoding.w_max}};
  j["weights"] = std::vector<double>(m.weights.data(),
                                     m.weights.data() + m.weights.size());
  j["lambda"] = m.lambda;
  j["seed"] = m.seed;
  j["schedule"] = {{"sweeps", m.schedule.sweeps},
                   {"t_init", m.schedule.t_init},
                   {"t_final", m.schedule.t_final},
                   {"restarts", m.schedule.restarts}};
  j["validation_mase"] = m.validation_mase;
  j["train_mean"] = m.train_mean;
  j["target_std"] = m.target_std;
  j["scaler"] = {{"features", m.scaler.features},
                 {"x_min", std::vector<double>(
                               m.scaler.x_min.data(),
                               m.scaler.x_min.data() + m.scaler.x_min.size())},
                 {"x_max", std::vector<double>(
                               m.scaler.x_max.data(),
                               m.scaler.x_max.data() + m.scaler.x_max.size())}};
  nlohmann::json trees = nlohmann::json::array();
  for (int t = 0; t < m.pool.size(); ++t) {
    trees.push_back({{"nodes", tree_to_json(m.pool.learners[t])},
                     {"features", m.pool.feature_subsets[t]}});
  }
  j["trees"] = std::move(trees);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
}

EnsembleModel load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "qoeopt-ensemble-v1") {
    throw Error(Errc::io_error, "not an ensemble model: " + path);
  }

  EnsembleModel m;
  m.target = kqi_from_name(j.at("target").get<std::string>());
  m.encoding.bits = j.at("encoding").at("bits").get<int>();
  m.encoding.w_min = j.at("encoding").at("w_min").get<double>();
  m.encoding.w_max = j.at("encoding").at("w_max").get<double>();
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                static_cast<int>(w.size()));
  m.lambda = j.at("lambda").get<double>();
  m.seed = j.at("seed").get<uint64_t>();
  m.schedule.sweeps = j.at("schedule").at("sweeps").get<int>();
  m.schedule.t_init = j.at("schedule").at("t_init").get<double>();
  m.schedule.t_final = j.at("schedule").at("t_final").get<double>();
  m.schedule.restarts = j.at("schedule").at("restarts").get<int>();
  m.validation_mase = j.at("validation_mase").is_null()
                          ? std::numeric_limits<double>::quiet_NaN()
                          : j.at("validation_mase").get<double>();
  m.train_mean = j.at("train_mean").get<double>();
  m.target_std = j.at("target_std").get<double>();
  m.scaler.features = j.at("scaler").at("features").get<std::vector<std::string>>();
  const auto lo = j.at("scaler").at("x_min").get<std::vector<double>>();
  const auto hi = j.at("scaler").at("x_max").get<std::vector<double>>();
  m.scaler.x_min = Eigen::Map<const Eigen::VectorXd>(lo.data(),
                                                     static_cast<int>(lo.size()));
  m.scaler.x_max = Eigen::Map<const Eigen::VectorXd>(hi.data(),
                                                     static_cast<int>(hi.size()));
  for (const auto& t : j.at("trees")) {
    m.pool.learners.push_back(tree_from_json(t.at("nodes")));
    m.pool.feature_subsets.push_back(t.at("features").get<std::vector<int>>());
  }
  return m;
}

}  // namespace qoeopt
