// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include <json.hpp>

#include "qoeopt/feature_ranking.hpp"
#include "qoeopt/metrics.hpp"
#include "qoeopt/rng.hpp"

namespace qoeopt {

namespace fs = std::filesystem;
using nlohmann::json;

ModelKind model_kind_from_name(std::string_view name) {
  if (name == "qubo") return ModelKind::qubo;
  if (name == "tt") return ModelKind::tt;
  throw Error(Errc::config_error,
              "unknown model kind: " + std::string(name) + " (want qubo|tt)");
}

const char* model_kind_name(ModelKind kind) {
  return kind == ModelKind::qubo ? "qubo" : "tt";
}

std::string RunConfig::models_path() const {
  return model_dir.empty() ? output_dir + "/models" : model_dir;
}
std::string RunConfig::processed_csv_path() const {
  return output_dir + "/processed.csv";
}
std::string RunConfig::scaler_path() const { return output_dir + "/scaler.json"; }
std::string RunConfig::discretizer_path() const {
  return output_dir + "/discretizer.json";
}

namespace {

int parse_min_res(const json& v) {
  if (v.is_number_integer()) {
    const int r = v.get<int>();
    if (r < 0 || r > 3) throw Error(Errc::config_error, "min_res out of range");
    return r;
  }
  return encode_resolution(v.get<std::string>());
}

void apply_config_json(RunConfig& cfg, const json& j) {
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    cfg.data_csv = p.value("data_csv", cfg.data_csv);
    cfg.output_dir = p.value("output_dir", cfg.output_dir);
    cfg.model_dir = p.value("model_dir", cfg.model_dir);
  }
  cfg.seed = j.value("seed", cfg.seed);

  if (j.contains("preprocess")) {
    const auto& p = j.at("preprocess");
    if (p.contains("iqr_factor")) {
      if (p.at("iqr_factor").is_string()) {
        cfg.iqr_factor = std::numeric_limits<double>::infinity();
      } else {
        cfg.iqr_factor = p.at("iqr_factor").get<double>();
      }
    }
    if (p.contains("fractions")) {
      const auto f = p.at("fractions").get<std::vector<double>>();
      if (f.size() != 3) throw Error(Errc::config_error, "need 3 fractions");
      cfg.fractions = {f[0], f[1], f[2]};
    }
  }

  if (j.contains("schema")) {
    const auto& s = j.at("schema");
    if (s.contains("features")) {
      cfg.schema.feature_columns =
          s.at("features").get<std::map<std::string, std::string>>();
    }
    if (s.contains("targets")) {
      for (const auto& [k, v] : s.at("targets").items()) {
        cfg.schema.target_columns[k] = v.get<std::string>();
      }
    }
  }
  if (j.contains("features")) {
    cfg.features = j.at("features").get<std::vector<std::string>>();
  }
  if (j.contains("mi")) cfg.mi_bins = j.at("mi").value("bins", cfg.mi_bins);

  if (j.contains("discretizer") && j.at("discretizer").contains("ranges")) {
    for (const auto& [name, r] : j.at("discretizer").at("ranges").items()) {
      FeatureRange fr;
      fr.min_allowed = r.at("min").get<double>();
      fr.max_allowed = r.at("max").get<double>();
      fr.discrete = r.value("discrete", false);
      cfg.discretizer_ranges[name] = fr;
    }
  }

  if (j.contains("qubo")) {
    const auto& q = j.at("qubo");
    cfg.qubo.learners = q.value("learners", cfg.qubo.learners);
    cfg.qubo.encoding.bits = q.value("bits", cfg.qubo.encoding.bits);
    cfg.qubo.encoding.w_min = q.value("w_min", cfg.qubo.encoding.w_min);
    cfg.qubo.encoding.w_max = q.value("w_max", cfg.qubo.encoding.w_max);
    cfg.qubo.lambda = q.value("lambda", cfg.qubo.lambda);
    if (q.contains("solver")) {
      const std::string s = q.at("solver").get<std::string>();
      if (s == "sa") cfg.qubo.solver = QuboSolverKind::simulated_annealing;
      else if (s == "exact") cfg.qubo.solver = QuboSolverKind::exact;
      else throw Error(Errc::config_error, "unknown qubo solver: " + s);
    }
    if (q.contains("schedule")) {
      const auto& s = q.at("schedule");
      cfg.qubo.schedule.sweeps = s.value("sweeps", cfg.qubo.schedule.sweeps);
      cfg.qubo.schedule.t_init = s.value("t_init", cfg.qubo.schedule.t_init);
      cfg.qubo.schedule.t_final = s.value("t_final", cfg.qubo.schedule.t_final);
      cfg.qubo.schedule.restarts =
          s.value("restarts", cfg.qubo.schedule.restarts);
    }
  }

  if (j.contains("tt")) {
    const auto& t = j.at("tt");
    cfg.tt.rank = t.value("rank", cfg.tt.rank);
    cfg.tt.learning_rate = t.value("learning_rate", cfg.tt.learning_rate);
    cfg.tt.epochs = t.value("epochs", cfg.tt.epochs);
    cfg.tt.batch_size = t.value("batch_size", cfg.tt.batch_size);
    cfg.tt.init_scale = t.value("init_scale", cfg.tt.init_scale);
    cfg.tt.clip_norm = t.value("clip_norm", cfg.tt.clip_norm);
  }

  if (j.contains("ttopt")) {
    const auto& t = j.at("ttopt");
    cfg.ttopt.rank = t.value("rank", cfg.ttopt.rank);
    cfg.ttopt.budget = t.value("budget", cfg.ttopt.budget);
    cfg.ttopt.no_improve_sweeps =
        t.value("no_improve_sweeps", cfg.ttopt.no_improve_sweeps);
    cfg.ttopt.maxvol_delta = t.value("maxvol_delta", cfg.ttopt.maxvol_delta);
    cfg.ttopt.maxvol_max_iter =
        t.value("maxvol_max_iter", cfg.ttopt.maxvol_max_iter);
  }

  if (j.contains("objective")) {
    const auto& o = j.at("objective");
    cfg.objective.alpha = o.value("alpha", cfg.objective.alpha);
    if (o.contains("min_res")) cfg.objective.min_res = parse_min_res(o.at("min_res"));
    cfg.objective.efps_scale = o.value("efps_scale", cfg.objective.efps_scale);
    cfg.objective.latency_scale =
        o.value("latency_scale", cfg.objective.latency_scale);
    cfg.objective.latency_exponent_coeff =
        o.value("latency_exponent_coeff", cfg.objective.latency_exponent_coeff);
    if (o.contains("service_weights")) {
      const auto w = o.at("service_weights").get<std::vector<double>>();
      if (w.size() != 3) throw Error(Errc::config_error, "need 3 service weights");
      for (int i = 0; i < 3; ++i) cfg.objective.service_weights[i] = w[i];
    }
    cfg.objective.prb_midpoint = o.value("prb_midpoint", cfg.objective.prb_midpoint);
    cfg.objective.prb_slope = o.value("prb_slope", cfg.objective.prb_slope);
    cfg.objective.prb_min = o.value("prb_min", cfg.objective.prb_min);
    cfg.objective.prb_max = o.value("prb_max", cfg.objective.prb_max);
    if (o.contains("resolution_values")) {
      cfg.objective.resolution_values =
          o.at("resolution_values").get<std::vector<int>>();
    }
    if (o.contains("fps_values")) {
      cfg.objective.fps_values = o.at("fps_values").get<std::vector<double>>();
    }
    cfg.objective.literal_network_term =
        o.value("literal_network_term", cfg.objective.literal_network_term);
  }

  if (j.contains("frozen_conditions")) {
    cfg.frozen_conditions =
        j.at("frozen_conditions").get<std::map<std::string, double>>();
  }

  if (j.contains("cv")) {
    const auto& c = j.at("cv");
    cfg.cv_folds = c.value("folds", cfg.cv_folds);
    if (c.contains("qubo_lambdas")) {
      cfg.cv_lambdas = c.at("qubo_lambdas").get<std::vector<double>>();
    }
    if (c.contains("tt_ranks")) {
      cfg.cv_ranks = c.at("tt_ranks").get<std::vector<int>>();
    }
  }
}

void ensure_dirs(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  fs::create_directories(cfg.models_path());
  fs::create_directories(cfg.output_dir + "/reports");
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, "bad config JSON: " + std::string(e.what()));
  }
  RunConfig cfg;
  apply_config_json(cfg, j);
  return cfg;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, "bad config JSON: " + std::string(e.what()));
  }
  RunConfig cfg;
  apply_config_json(cfg, j);
  return cfg;
}

PreprocessReport cmd_preprocess(const RunConfig& cfg) {
  if (cfg.data_csv.empty()) {
    throw Error(Errc::config_error, "no data_csv configured");
  }
  ensure_dirs(cfg);

  std::vector<CsvReject> rejects;
  Dataset raw = load_csv(cfg.data_csv, cfg.schema, &rejects);
  Dataset selected = raw.select_features(cfg.features);
  Dataset filtered = remove_outliers(selected, cfg.iqr_factor);
  Dataset split = assign_splits(std::move(filtered), cfg.fractions, cfg.seed);

  save_csv(split, cfg.processed_csv_path(), /*include_split=*/true);
  const ScalerSpec scaler = fit_scaler(split, cfg.features);
  save_scaler(scaler, cfg.scaler_path());
  const DiscretizerSpec disc = fit_discretizer(cfg.features, cfg.discretizer_ranges);
  save_discretizer(disc, cfg.discretizer_path());

  PreprocessReport rep;
  rep.rows_loaded = raw.size();
  rep.rows_rejected = static_cast<int>(rejects.size());
  rep.rows_after_filter = split.size();
  rep.train = static_cast<int>(split.split_rows(Split::train).size());
  rep.val = static_cast<int>(split.split_rows(Split::val).size());
  rep.test = static_cast<int>(split.split_rows(Split::test).size());
  return rep;
}

Dataset load_processed(const RunConfig& cfg) {
  CsvSchema schema = CsvSchema::canonical();
  schema.feature_columns.clear();
  for (const auto& f : cfg.features) schema.feature_columns[f] = f;
  Dataset d = load_csv(cfg.processed_csv_path(), schema);
  if (!d.has_splits()) {
    throw Error(Errc::io_error, "processed dataset lacks split tags; run preprocess");
  }
  return d;
}

std::string model_base_path(const RunConfig& cfg, ModelKind kind, Kqi target) {
  std::string kqi = kqi_name(target);
  std::replace(kqi.begin(), kqi.end(), ' ', '_');
  std::transform(kqi.begin(), kqi.end(), kqi.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return cfg.models_path() + "/" + model_kind_name(kind) + "_" + kqi;
}

namespace {

// validation-MASE of one fit, used as the CV fold score
double fold_score_qubo(const Dataset& pool, Kqi target, EnsembleConfig ecfg) {
  const EnsembleModel m = fit_ensemble(pool, target, ecfg);
  return std::isnan(m.validation_mase)
             ? std::numeric_limits<double>::infinity()
             : m.validation_mase;
}

double fold_score_tt(const Dataset& pool, Kqi target, const RunConfig& cfg,
                     TrainConfig tcfg) {
  const MiTable ranked = rank_features(pool, target, cfg.mi_bins);
  const FeatureOrder order = center_out_order(ranked);
  const DiscretizerSpec disc =
      fit_discretizer(pool.feature_names(), cfg.discretizer_ranges);
  const TTModel m = fit_tt(pool, order, disc, target, tcfg);
  return std::isnan(m.validation_mase)
             ? std::numeric_limits<double>::infinity()
             : m.validation_mase;
}

double evaluate_test_mase(const Dataset& d, Kqi target, double train_mean,
                          const std::function<double(const Sample&)>& predict) {
  const std::vector<int> rows = d.split_rows(Split::test);
  Eigen::VectorXd pred(static_cast<int>(rows.size()));
  Eigen::VectorXd actual(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    pred(static_cast<int>(i)) = predict(d.sample(rows[i]));
    actual(static_cast<int>(i)) =
        d.targets()(rows[i], static_cast<int>(target));
  }
  return mase_constant_baseline(pred, actual, train_mean).mase;
}

void append_summary_row(const RunConfig& cfg, const TrainReport& rep) {
  const std::string path = cfg.output_dir + "/reports/model_summary.csv";
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  if (fresh) out << "model,kqi,loading_ms,inference_ms,mase,features\n";
  out << model_kind_name(rep.model) << ",\"" << kqi_name(rep.target) << "\","
      << format_short(rep.load_ms) << ',' << format_short(rep.infer_ms) << ','
      << format_g(rep.test_mase) << ',' << rep.features << '\n';
}

}  // namespace

std::vector<TrainReport> cmd_train(const RunConfig& cfg, ModelKind model,
                                   Kqi target,
                                   const std::vector<int>& feature_counts) {
  ensure_dirs(cfg);
  Dataset d = load_processed(cfg);

  const MiTable ranked = rank_features(d, target, cfg.mi_bins);
  save_mi_csv(ranked, cfg.output_dir + "/reports/mi_" +
                          std::string(model_kind_name(model)) + ".csv");

  std::vector<int> counts = feature_counts;
  if (counts.empty()) counts = {static_cast<int>(cfg.features.size())};

  // train+val pool and deterministic fold tags for CV
  std::vector<int> pool_rows = d.split_rows(Split::train);
  {
    const std::vector<int> val_rows = d.split_rows(Split::val);
    pool_rows.insert(pool_rows.end(), val_rows.begin(), val_rows.end());
  }
  std::sort(pool_rows.begin(), pool_rows.end());
  std::vector<int> fold_of(pool_rows.size());
  {
    std::vector<int> shuffled(pool_rows.size());
    for (size_t i = 0; i < shuffled.size(); ++i) shuffled[i] = static_cast<int>(i);
    Rng rng(derive_seed(cfg.seed, 0xCF));
    rng.shuffle(shuffled);
    for (size_t i = 0; i < shuffled.size(); ++i) {
      fold_of[static_cast<size_t>(shuffled[i])] =
          static_cast<int>(i) % cfg.cv_folds;
    }
  }

  std::vector<TrainReport> reports;
  for (int count : counts) {
    if (count < 1 || count > static_cast<int>(ranked.entries.size())) {
      throw Error(Errc::config_error,
                  "feature count out of range: " + std::to_string(count));
    }
    std::vector<std::string> top;
    for (int i = 0; i < count; ++i) top.push_back(ranked.entries[i].feature);
    const Dataset d_sel = d.select_features(top);

    // pick the hyperparameter by mean validation MASE over the folds
    auto cv_mean = [&](auto&& fit_score) {
      double sum = 0.0;
      for (int f = 0; f < cfg.cv_folds; ++f) {
        Dataset pool = d_sel.subset(pool_rows);
        std::vector<Split> tags(pool.size());
        for (int i = 0; i < pool.size(); ++i) {
          tags[static_cast<size_t>(i)] =
              fold_of[static_cast<size_t>(i)] == f ? Split::val : Split::train;
        }
        pool.set_splits(std::move(tags));
        sum += fit_score(pool);
      }
      return sum / cfg.cv_folds;
    };

    TrainReport rep;
    rep.model = model;
    rep.target = target;
    rep.features = count;

    if (model == ModelKind::qubo) {
      double best_lambda = cfg.cv_lambdas.empty() ? cfg.qubo.lambda
                                                  : cfg.cv_lambdas.front();
      double best_score = std::numeric_limits<double>::infinity();
      for (double lambda : cfg.cv_lambdas) {
        EnsembleConfig ecfg = cfg.qubo;
        ecfg.lambda = lambda;
        ecfg.seed = cfg.seed;
        const double score = cv_mean([&](const Dataset& pool) {
          return fold_score_qubo(pool, target, ecfg);
        });
        if (score < best_score) {
          best_score = score;
          best_lambda = lambda;
        }
      }
      EnsembleConfig ecfg = cfg.qubo;
      ecfg.lambda = best_lambda;
      ecfg.seed = cfg.seed;
      {
        std::string kqi = kqi_name(target);
        std::replace(kqi.begin(), kqi.end(), ' ', '_');
        ecfg.qubo_export_path =
            cfg.output_dir + "/reports/qubo_" + kqi + ".txt";
      }
      const EnsembleModel m = fit_ensemble(d_sel, target, ecfg);
      rep.cv_choice = best_lambda;
      rep.validation_mase = m.validation_mase;
      rep.model_path = model_base_path(cfg, model, target) + ".json";
      save_ensemble(m, rep.model_path);

      EnsembleModel loaded;
      const TimingReport t = time_model(
          [&] { loaded = load_ensemble(rep.model_path); },
          [&] {
            for (int r : d_sel.split_rows(Split::test)) {
              (void)loaded.predict(d_sel.sample(r));
            }
          },
          3, static_cast<int>(d_sel.split_rows(Split::test).size()));
      rep.load_ms = t.load_ms;
      rep.infer_ms = t.infer_ms;
      rep.test_mase = evaluate_test_mase(
          d_sel, target, m.train_mean,
          [&](const Sample& s) { return loaded.predict(s); });
    } else {
      int best_rank = cfg.cv_ranks.empty() ? cfg.tt.rank : cfg.cv_ranks.front();
      double best_score = std::numeric_limits<double>::infinity();
      for (int rank : cfg.cv_ranks) {
        TrainConfig tcfg = cfg.tt;
        tcfg.rank = rank;
        tcfg.seed = cfg.seed;
        const double score = cv_mean([&](const Dataset& pool) {
          return fold_score_tt(pool, target, cfg, tcfg);
        });
        if (score < best_score) {
          best_score = score;
          best_rank = rank;
        }
      }
      TrainConfig tcfg = cfg.tt;
      tcfg.rank = best_rank;
      tcfg.seed = cfg.seed;
      const MiTable ranked_sel = rank_features(d_sel, target, cfg.mi_bins);
      const FeatureOrder order = center_out_order(ranked_sel);
      const DiscretizerSpec disc = fit_discretizer(top, cfg.discretizer_ranges);
      const TTModel m = fit_tt(d_sel, order, disc, target, tcfg);
      rep.cv_choice = best_rank;
      rep.validation_mase = m.validation_mase;
      rep.model_path = model_base_path(cfg, model, target);
      save_tt(m, rep.model_path);

      TTModel loaded;
      const TimingReport t = time_model(
          [&] { loaded = load_tt(rep.model_path); },
          [&] {
            for (int r : d_sel.split_rows(Split::test)) {
              (void)predict_tt(loaded, d_sel.sample(r));
            }
          },
          3, static_cast<int>(d_sel.split_rows(Split::test).size()));
      rep.load_ms = t.load_ms;
      rep.infer_ms = t.infer_ms;
      rep.test_mase = evaluate_test_mase(
          d_sel, target, m.train_mean,
          [&](const Sample& s) { return predict_tt(loaded, s); });
    }

    append_summary_row(cfg, rep);
    reports.push_back(std::move(rep));
  }

  if (reports.size() > 1) {
    std::string kqi = kqi_name(target);
    std::replace(kqi.begin(), kqi.end(), ' ', '_');
    const std::string path = cfg.output_dir + "/reports/mase_vs_features_" +
                             model_kind_name(model) + "_" + kqi + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    out << "model,kqi,features,mase\n";
    for (const auto& rep : reports) {
      out << model_kind_name(rep.model) << ",\"" << kqi_name(rep.target)
          << "\"," << rep.features << ',' << format_g(rep.test_mase) << '\n';
    }
  }
  return reports;
}

namespace {

ModelKqiPredictor load_predictor(const RunConfig& cfg, ModelKind kind) {
  ModelKqiPredictor pred(cfg.frozen_conditions);
  for (const Kqi k : {Kqi::latency, Kqi::efps, Kqi::freeze}) {
    const std::string base = model_base_path(cfg, kind, k);
    const bool required = (k != Kqi::freeze);
    if (kind == ModelKind::qubo) {
      if (fs::exists(base + ".json")) {
        pred.set_model(k, load_ensemble(base + ".json"));
      } else if (required) {
        throw Error(Errc::missing_model,
                    std::string("missing model for KQI ") + kqi_name(k) + ": " +
                        base + ".json");
      }
    } else {
      if (fs::exists(base + ".json")) {
        pred.set_model(k, load_tt(base));
      } else if (required) {
        throw Error(Errc::missing_model,
                    std::string("missing model for KQI ") + kqi_name(k) + ": " +
                        base + ".json");
      }
    }
  }
  return pred;
}

OptimizeReport run_optimize(const RunConfig& cfg, const KqiPredictor& pred,
                            double alpha, int min_res,
                            const std::string& method, int runs) {
  if (runs < 1) throw Error(Errc::config_error, "need runs >= 1");
  ObjectiveSpec spec = cfg.objective;
  spec.alpha = alpha;
  spec.min_res = min_res;
  spec.validate();
  const Grid grid = build_decision_grid(spec);
  const ObjectiveFn f = make_objective_fn(spec, pred, grid);

  OptimizeReport rep;
  rep.method = method;
  rep.alpha = alpha;
  rep.min_res = min_res;
  rep.runs = runs;

  std::vector<OptResult> results;
  if (method == "brute") {
    for (int r = 0; r < runs; ++r) {
      results.push_back(brute_force_maximize(f, grid));
    }
  } else if (method == "ttopt") {
    for (int r = 0; r < runs; ++r) {
      results.push_back(ttopt_maximize(f, grid, cfg.ttopt,
                                       derive_seed(cfg.seed, static_cast<uint64_t>(r))));
    }
  } else {
    throw Error(Errc::config_error, "unknown method: " + method + " (want ttopt|brute)");
  }

  double time_sum = 0.0, obj_sum = 0.0;
  for (const auto& r : results) {
    time_sum += r.wall_ms;
    obj_sum += r.objective;
  }
  rep.mean_time_ms = time_sum / runs;
  rep.mean_objective = obj_sum / runs;

  // modal configuration across runs; ties to the lexicographically smallest
  std::map<std::vector<int>, int> counts;
  for (const auto& r : results) ++counts[r.index];
  const auto modal = std::max_element(
      counts.begin(), counts.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return b.first < a.first;
      });
  for (const auto& r : results) {
    if (r.index == modal->first) {
      rep.result = r;
      break;
    }
  }

  const DecisionPoint p = decision_from_index(grid, rep.result.index);
  rep.result.predicted["Latency"] = std::max(0.0, pred.latency(p));
  rep.result.predicted["EFPS"] = std::max(0.0, pred.efps(p));
  const double fr = pred.freeze(p);
  if (!std::isnan(fr)) rep.result.predicted["Freeze Percentage"] = fr;
  return rep;
}

}  // namespace

void write_opt_result_json(const OptimizeReport& rep, const Grid& grid,
                           const std::string& path) {
  json j;
  j["method"] = rep.method;
  j["alpha"] = rep.alpha;
  j["min_res"] = rep.min_res;
  j["min_res_label"] = resolution_label(rep.min_res);
  j["runs"] = rep.runs;
  j["mean_time_ms"] = rep.mean_time_ms;
  j["mean_objective"] = rep.mean_objective;
  json cfgj;
  for (size_t k = 0; k < rep.result.index.size(); ++k) {
    cfgj[grid.dims[k].name] = {{"index", rep.result.index[k]},
                               {"value", rep.result.values[k]}};
  }
  j["configuration"] = cfgj;
  j["objective"] = rep.result.objective;
  j["predicted_kqis"] = rep.result.predicted;
  j["evaluations"] = rep.result.evaluations;
  j["wall_ms"] = rep.result.wall_ms;
  j["tie_count"] = rep.result.tie_count;
  j["sweeps"] = rep.result.sweeps;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
}

OptimizeReport cmd_optimize(const RunConfig& cfg, double alpha, int min_res,
                            const std::string& method, int runs,
                            ModelKind model) {
  ensure_dirs(cfg);
  const ModelKqiPredictor pred = load_predictor(cfg, model);
  OptimizeReport rep = run_optimize(cfg, pred, alpha, min_res, method, runs);

  ObjectiveSpec spec = cfg.objective;
  spec.alpha = alpha;
  spec.min_res = min_res;
  const Grid grid = build_decision_grid(spec);
  char name[128];
  std::snprintf(name, sizeof(name), "/reports/opt_%s_a%.2f_%s.json",
                method.c_str(), alpha, resolution_label(min_res).c_str());
  write_opt_result_json(rep, grid, cfg.output_dir + name);
  return rep;
}

std::vector<OptimizeReport> cmd_alpha_sweep(const RunConfig& cfg,
                                            const std::vector<double>& alphas,
                                            const std::vector<int>& min_res_values,
                                            int runs, ModelKind model) {
  ensure_dirs(cfg);
  const ModelKqiPredictor pred = load_predictor(cfg, model);

  std::vector<OptimizeReport> rows;
  for (int mr : min_res_values) {
    for (double a : alphas) {
      for (const char* method : {"ttopt", "brute"}) {
        rows.push_back(run_optimize(cfg, pred, a, mr, method, runs));
      }
    }
  }

  const std::string path = cfg.output_dir + "/reports/alpha_sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << "min_res,alpha,method,mean_objective,mean_time_ms\n";
  for (const auto& r : rows) {
    out << resolution_label(r.min_res) << ',' << format_short(r.alpha) << ','
        << r.method << ',' << format_g(r.mean_objective) << ','
        << format_short(r.mean_time_ms) << '\n';
  }
  return rows;
}

std::vector<BenchmarkRow> cmd_benchmark(const RunConfig& cfg, int runs) {
  ensure_dirs(cfg);
  Dataset d = load_processed(cfg);
  const std::vector<int> test_rows = d.split_rows(Split::test);

  std::vector<BenchmarkRow> rows;
  for (const ModelKind kind : {ModelKind::qubo, ModelKind::tt}) {
    for (const Kqi target : {Kqi::latency, Kqi::freeze, Kqi::efps}) {
      const std::string base = model_base_path(cfg, kind, target);
      if (!fs::exists(base + ".json")) continue;

      BenchmarkRow row;
      row.model = model_kind_name(kind);
      row.kqi = kqi_name(target);

      if (kind == ModelKind::qubo) {
        EnsembleModel m;
        const TimingReport t = time_model(
            [&] { m = load_ensemble(base + ".json"); },
            [&] {
              for (int r : test_rows) (void)m.predict(d.sample(r));
            },
            runs, static_cast<int>(test_rows.size()));
        row.load_ms = t.load_ms;
        row.infer_ms = t.infer_ms;
        row.low_confidence = t.low_confidence;
        row.features = static_cast<int>(m.scaler.features.size());
        row.test_mase = evaluate_test_mase(
            d.select_features(m.scaler.features), target, m.train_mean,
            [&](const Sample& s) { return m.predict(s); });
      } else {
        TTModel m;
        const TimingReport t = time_model(
            [&] { m = load_tt(base); },
            [&] {
              for (int r : test_rows) (void)predict_tt(m, d.sample(r));
            },
            runs, static_cast<int>(test_rows.size()));
        row.load_ms = t.load_ms;
        row.infer_ms = t.infer_ms;
        row.low_confidence = t.low_confidence;
        row.features = static_cast<int>(m.order.order.size());
        row.test_mase = evaluate_test_mase(
            d, target, m.train_mean,
            [&](const Sample& s) { return predict_tt(m, s); });
      }
      rows.push_back(std::move(row));
    }
  }

  const std::string path = cfg.output_dir + "/reports/benchmark.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << "model,kqi,loading_ms,inference_ms,mase,features,low_confidence\n";
  for (const auto& r : rows) {
    out << r.model << ",\"" << r.kqi << "\"," << format_short(r.load_ms) << ','
        << format_short(r.infer_ms) << ',' << format_g(r.test_mase) << ','
        << r.features << ',' << (r.low_confidence ? 1 : 0) << '\n';
  }

  json jrows = json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"model", r.model},
                     {"kqi", r.kqi},
                     {"loading_ms", r.load_ms},
                     {"inference_ms", r.infer_ms},
                     {"mase", r.test_mase},
                     {"features", r.features},
                     {"runs", runs},
                     {"test_set_size", static_cast<int>(test_rows.size())},
                     {"low_confidence", r.low_confidence}});
  }
  std::ofstream jout(cfg.output_dir + "/reports/benchmark.json",
                     std::ios::binary);
  if (!jout) {
    throw Error(Errc::io_error,
                "cannot write " + cfg.output_dir + "/reports/benchmark.json");
  }
  jout << jrows.dump(2) << '\n';
  return rows;
}

SynthReport cmd_synth(const RunConfig& cfg, int n, double noise) {
  ensure_dirs(cfg);
  const Dataset d = generate_synthetic(n, cfg.seed, noise);
  SynthReport rep;
  rep.rows = d.size();
  rep.csv_path = cfg.output_dir + "/synthetic.csv";
  rep.version = kSyntheticVersion;
  save_csv(d, rep.csv_path);
  return rep;
}

}  // namespace qoeopt
