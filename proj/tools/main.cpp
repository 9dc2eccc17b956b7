// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qoeopt/cli.hpp"
#include "qoeopt/rng.hpp"

namespace {

using qoeopt::RunConfig;

struct GlobalFlags {
  std::string config_path;
  std::string output_dir;
  long seed = -1;
  bool json_errors = false;
};

RunConfig make_config(const GlobalFlags& g) {
  RunConfig cfg = g.config_path.empty()
                      ? RunConfig{}
                      : RunConfig::from_json_file(g.config_path);
  if (!g.output_dir.empty()) cfg.output_dir = g.output_dir;
  if (g.seed >= 0) cfg.seed = static_cast<uint64_t>(g.seed);
  return cfg;
}

// "N" or "A-B" inclusive
std::vector<int> parse_feature_counts(const std::string& text) {
  if (text.empty()) return {};
  const auto dash = text.find('-');
  if (dash == std::string::npos) return {std::stoi(text)};
  const int lo = std::stoi(text.substr(0, dash));
  const int hi = std::stoi(text.substr(dash + 1));
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t comma = text.find(',', pos);
    const std::string tok = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int parse_min_res_flag(const std::string& text) {
  if (text.size() == 1 && text[0] >= '0' && text[0] <= '3') {
    return text[0] - '0';
  }
  return qoeopt::encode_resolution(text);
}

void report_error(const qoeopt::Error& e, bool json_errors) {
  if (json_errors) {
    nlohmann::json j;
    j["error"] = {{"code", qoeopt::errc_name(e.code())},
                  {"exit", e.exit_status()},
                  {"message", e.what()}};
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "error (" << qoeopt::errc_name(e.code()) << "): " << e.what()
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QoE estimation and optimization toolkit for cloud gaming over cellular networks"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--out", g.output_dir, "output directory override");
  app.add_option("--seed", g.seed, "seed override");
  app.add_flag("--json-errors", g.json_errors, "emit errors as JSON on stderr");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
  synth->fallthrough();
  int synth_n = 1000;
  double synth_noise = 0.1;
  synth->add_option("-n,--count", synth_n, "row count");
  synth->add_option("--noise", synth_noise, "noise level");

  // preprocess
  auto* pre = app.add_subcommand(
      "preprocess", "load CSV, filter outliers, split, fit scaling specs");
  pre->fallthrough();
  std::string pre_csv;
  pre->add_option("--data", pre_csv, "input CSV (overrides config)");

  // train
  auto* train = app.add_subcommand("train", "train one regressor per KQI");
  train->fallthrough();
  std::string train_model = "qubo", train_target = "Latency",
              train_features;
  train->add_option("--model", train_model, "qubo|tt");
  train->add_option("--target", train_target, "Latency|Freeze Percentage|EFPS");
  train->add_option("--features", train_features,
                    "feature count N or sweep A-B (default: all)");

  // optimize
  auto* opt = app.add_subcommand("optimize", "search the decision grid");
  opt->fallthrough();
  std::string opt_method = "ttopt", opt_minres = "720p", opt_model = "qubo";
  std::string opt_alpha_sweep;
  double opt_alpha = 0.8;
  int opt_runs = 1;
  opt->add_option("--model", opt_model, "predictor family: qubo|tt");
  opt->add_option("--method", opt_method, "ttopt|brute");
  opt->add_option("--alpha", opt_alpha, "trade-off weight in [0,1]");
  opt->add_option("--alpha-sweep", opt_alpha_sweep,
                  "comma-separated alphas; sweeps all resolutions");
  opt->add_option("--min-res", opt_minres, "minimum acceptable resolution");
  opt->add_option("--runs", opt_runs, "repetitions for timing statistics");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "model loading/inference timing");
  bench->fallthrough();
  int bench_runs = 100;
  bench->add_option("--runs", bench_runs, "timing repetitions");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = make_config(g);

    if (synth->parsed()) {
      const auto rep = qoeopt::cmd_synth(cfg, synth_n, synth_noise);
      std::cout << "wrote " << rep.rows << " rows to " << rep.csv_path
                << " (ground truth " << rep.version << ", seed " << cfg.seed
                << ")\n";
    } else if (pre->parsed()) {
      if (!pre_csv.empty()) cfg.data_csv = pre_csv;
      const auto rep = qoeopt::cmd_preprocess(cfg);
      std::cout << "loaded " << rep.rows_loaded << " rows ("
                << rep.rows_rejected << " rejected), " << rep.rows_after_filter
                << " after outlier filter; splits " << rep.train << "/"
                << rep.val << "/" << rep.test << '\n';
    } else if (train->parsed()) {
      const auto reports = qoeopt::cmd_train(
          cfg, qoeopt::model_kind_from_name(train_model),
          qoeopt::kqi_from_name(train_target),
          parse_feature_counts(train_features));
      for (const auto& r : reports) {
        std::printf("%s %s features=%d test MASE %.4f (val %.4f, cv %.3g)\n",
                    qoeopt::model_kind_name(r.model), qoeopt::kqi_name(r.target),
                    r.features, r.test_mase, r.validation_mase, r.cv_choice);
      }
      if (!reports.empty()) {
        std::cout << "model written to " << reports.back().model_path << '\n';
      }
    } else if (opt->parsed()) {
      const auto kind = qoeopt::model_kind_from_name(opt_model);
      if (!opt_alpha_sweep.empty()) {
        const auto rows = qoeopt::cmd_alpha_sweep(
            cfg, parse_alpha_list(opt_alpha_sweep), cfg.objective.resolution_values,
            opt_runs, kind);
        std::cout << "alpha sweep: " << rows.size() << " rows -> "
                  << cfg.output_dir << "/reports/alpha_sweep.csv\n";
      } else {
        const auto rep = qoeopt::cmd_optimize(cfg, opt_alpha,
                                              parse_min_res_flag(opt_minres),
                                              opt_method, opt_runs, kind);
        std::printf(
            "%s alpha=%.2f min-res=%s: PRB=%d res=%s fps=%g J=%.6f "
            "(evals %ld, ties %ld, mean %.3f ms)\n",
            rep.method.c_str(), rep.alpha,
            qoeopt::resolution_label(rep.min_res).c_str(),
            static_cast<int>(rep.result.values[0]),
            qoeopt::resolution_label(static_cast<int>(rep.result.values[1])).c_str(),
            rep.result.values[2], rep.result.objective, rep.result.evaluations,
            rep.result.tie_count, rep.mean_time_ms);
      }
    } else if (bench->parsed()) {
      const auto rows = qoeopt::cmd_benchmark(cfg, bench_runs);
      for (const auto& r : rows) {
        std::printf("%-5s %-18s load %8.3f ms  infer %8.3f ms  MASE %.4f%s\n",
                    r.model.c_str(), r.kqi.c_str(), r.load_ms, r.infer_ms,
                    r.test_mase, r.low_confidence ? "  (single run)" : "");
      }
    }
  } catch (const qoeopt::Error& e) {
    report_error(e, g.json_errors);
    return e.exit_status();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
