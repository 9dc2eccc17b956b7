// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qoeopt/dataset.hpp"
#include "qoeopt/ensemble.hpp"
#include "qoeopt/objective.hpp"
#include "qoeopt/tt.hpp"
#include "qoeopt/ttopt.hpp"

namespace qoeopt {

enum class ModelKind { qubo, tt };
ModelKind model_kind_from_name(std::string_view name);
const char* model_kind_name(ModelKind kind);

// Everything a command needs, loaded from the JSON config file with flag
// overrides applied on top. All artifacts are written under output_dir.
struct RunConfig {
  std::string data_csv;
  std::string output_dir = "out";
  std::string model_dir;  // defaults to <output_dir>/models
  uint64_t seed = 7;

  double iqr_factor = 1.5;
  SplitFractions fractions;
  CsvSchema schema = CsvSchema::canonical();
  std::vector<std::string> features = default_feature_names();
  int mi_bins = 20;
  std::map<std::string, FeatureRange> discretizer_ranges =
      default_discretizer_ranges();

  EnsembleConfig qubo;
  TrainConfig tt;
  TtOptConfig ttopt;
  ObjectiveSpec objective;
  std::map<std::string, double> frozen_conditions = default_frozen_conditions();

  int cv_folds = 5;
  std::vector<double> cv_lambdas = {0.0, 0.1};
  std::vector<int> cv_ranks = {2, 4};

  std::string models_path() const;
  std::string processed_csv_path() const;
  std::string scaler_path() const;
  std::string discretizer_path() const;

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
};

struct PreprocessReport {
  int rows_loaded = 0;
  int rows_rejected = 0;
  int rows_after_filter = 0;
  int train = 0;
  int val = 0;
  int test = 0;
};

// load -> outlier filter -> split -> fit scaler + discretizer; persists the
// processed dataset and both specs
PreprocessReport cmd_preprocess(const RunConfig& cfg);

struct TrainReport {
  ModelKind model = ModelKind::qubo;
  Kqi target = Kqi::latency;
  int features = 0;
  double test_mase = 0.0;
  double validation_mase = 0.0;
  double cv_choice = 0.0;  // selected lambda (qubo) or rank (tt)
  double load_ms = 0.0;
  double infer_ms = 0.0;
  std::string model_path;
};

// Five-fold CV over the train+val pool picks the hyperparameter, the final
// model is fit on the train split and scored on test. `feature_counts` runs a
// sweep and emits a mase-vs-feature-count CSV; the last entry's model is the
// one persisted.
std::vector<TrainReport> cmd_train(const RunConfig& cfg, ModelKind model,
                                   Kqi target,
                                   const std::vector<int>& feature_counts);

struct OptimizeReport {
  std::string method;
  double alpha = 0.0;
  int min_res = 0;
  OptResult result;          // representative (modal) run
  double mean_time_ms = 0.0;
  double mean_objective = 0.0;
  int runs = 0;
};

OptimizeReport cmd_optimize(const RunConfig& cfg, double alpha, int min_res,
                            const std::string& method, int runs,
                            ModelKind model);

// alpha x min-res sweep comparing both methods; writes a plot-ready CSV
// (min_res, alpha, method, mean_objective, mean_time_ms) and returns the rows
std::vector<OptimizeReport> cmd_alpha_sweep(const RunConfig& cfg,
                                            const std::vector<double>& alphas,
                                            const std::vector<int>& min_res_values,
                                            int runs, ModelKind model);

struct BenchmarkRow {
  std::string model;
  std::string kqi;
  double load_ms = 0.0;
  double infer_ms = 0.0;
  double test_mase = 0.0;
  int features = 0;
  bool low_confidence = false;
};

std::vector<BenchmarkRow> cmd_benchmark(const RunConfig& cfg, int runs);

struct SynthReport {
  int rows = 0;
  std::string csv_path;
  std::string version;
};

SynthReport cmd_synth(const RunConfig& cfg, int n, double noise);

// helpers shared by commands and tests
Dataset load_processed(const RunConfig& cfg);
std::string model_base_path(const RunConfig& cfg, ModelKind kind, Kqi target);
void write_opt_result_json(const OptimizeReport& rep, const Grid& grid,
                           const std::string& path);

}  // namespace qoeopt
