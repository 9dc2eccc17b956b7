// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qoeopt/error.hpp"

namespace qoeopt {

enum class Split : uint8_t { train = 0, val = 1, test = 2 };

enum class Kqi : int { latency = 0, freeze = 1, efps = 2 };
inline constexpr int kNumKqis = 3;

const char* kqi_name(Kqi k);
Kqi kqi_from_name(std::string_view name);

// Canonical feature names of the cloud-gaming measurement schema.
namespace feat {
inline constexpr const char* fps = "FPS";
inline constexpr const char* ping_avg = "Ping avg";
inline constexpr const char* resolution = "Resolution";
inline constexpr const char* rsrp = "RSRP";
inline constexpr const char* sinr = "SINR";
inline constexpr const char* rsrq = "RSRQ";
inline constexpr const char* rssi = "RSSI";
inline constexpr const char* ping_host_loss = "Ping Host Loss";
inline constexpr const char* prbs = "PRBs";
}  // namespace feat

std::vector<std::string> default_feature_names();

// One measurement row. Feature units: ms (Ping avg), dB (SINR, RSRQ),
// dBm (RSRP, RSSI), frames/s (FPS), ordinal index (Resolution), count (PRBs),
// fraction (Ping Host Loss). Freeze is stored as a fraction in [0, 1].
struct Sample {
  std::map<std::string, double> features;
  double latency = 0.0;
  double freeze = 0.0;
  double efps = 0.0;

  double target(Kqi k) const;
};

struct Provenance {
  std::string csv_path;
  std::optional<uint64_t> synthetic_seed;
};

// Dense column store over the canonical schema. Immutable after construction
// apart from split assignment; all operations on it are pure.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features,
          Eigen::MatrixXd targets);

  int size() const { return static_cast<int>(features_.rows()); }
  int num_features() const { return static_cast<int>(features_.cols()); }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  // -1 when absent
  int feature_index(std::string_view name) const;

  const Eigen::MatrixXd& features() const { return features_; }
  // n x 3, columns ordered (Latency, Freeze Percentage, EFPS)
  const Eigen::MatrixXd& targets() const { return targets_; }
  Eigen::VectorXd target(Kqi k) const {
    return targets_.col(static_cast<int>(k));
  }

  bool has_splits() const { return !splits_.empty(); }
  const std::vector<Split>& splits() const { return splits_; }
  void set_splits(std::vector<Split> s);

  Sample sample(int i) const;
  std::vector<int> split_rows(Split s) const;
  Dataset subset(const std::vector<int>& rows) const;
  Dataset select_features(const std::vector<std::string>& names) const;

  Provenance provenance;

 private:
  std::vector<std::string> feature_names_;
  Eigen::MatrixXd features_;  // n x F
  Eigen::MatrixXd targets_;   // n x 3
  std::vector<Split> splits_;
};

// Maps canonical names to CSV headers. A header containing '%' on the freeze
// column marks percent-valued input, divided by 100 at load time.
struct CsvSchema {
  std::map<std::string, std::string> feature_columns;
  std::map<std::string, std::string> target_columns;

  static CsvSchema canonical();
};

struct CsvReject {
  int line = 0;  // 1-based physical line in the file
  std::string reason;
};

Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 std::vector<CsvReject>* rejects = nullptr);
void save_csv(const Dataset& d, const std::string& path,
              bool include_split = false);

// Per-target IQR fences [Q1 - k*IQR, Q3 + k*IQR]; quartiles use linear
// interpolation on the sorted values.
struct TargetFences {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
};
TargetFences target_fences(const Dataset& d, double iqr_factor);
Dataset filter_by_fences(const Dataset& d, const TargetFences& f);
Dataset remove_outliers(const Dataset& d, double iqr_factor = 1.5);

// 720p -> 0, 1080p -> 1, 1440p -> 2, 4K -> 3 (case-insensitive)
int encode_resolution(std::string_view label);
std::string resolution_label(int index);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

// Deterministic shuffled assignment. Counts: floor(train*n), floor(val*n),
// remainder to test.
Dataset assign_splits(Dataset d, const SplitFractions& fractions,
                      uint64_t seed);

// Min-max scaling to [0, 1]; fit on the train split only, out-of-range
// values are clamped at apply time.
struct ScalerSpec {
  std::vector<std::string> features;
  Eigen::VectorXd x_min;
  Eigen::VectorXd x_max;

  int index_of(std::string_view name) const;
};

ScalerSpec fit_scaler(const Dataset& d, const std::vector<std::string>& features);
double scale_value(const ScalerSpec& s, int feature, double x);
double unscale_value(const ScalerSpec& s, int feature, double scaled);
Eigen::VectorXd apply_scaler(const ScalerSpec& s, const Sample& x);
Eigen::MatrixXd apply_scaler(const ScalerSpec& s, const Dataset& d,
                             const std::vector<int>& rows);

void save_scaler(const ScalerSpec& s, const std::string& path);
ScalerSpec load_scaler(const std::string& path);

// Integer-grid discretization over predetermined allowed ranges. Discrete
// features get max - min values, continuous ones a fixed 100-point grid.
struct FeatureRange {
  double min_allowed = 0.0;
  double max_allowed = 1.0;
  bool discrete = false;
};

struct DiscretizerSpec {
  std::vector<std::string> features;
  Eigen::VectorXd x_min;
  Eigen::VectorXd x_max;
  Eigen::VectorXi n_vals;

  static constexpr int kContinuousVals = 100;
  int index_of(std::string_view name) const;
};

DiscretizerSpec fit_discretizer(const std::vector<std::string>& features,
                                const std::map<std::string, FeatureRange>& ranges);
DiscretizerSpec subset_discretizer(const DiscretizerSpec& spec,
                                   const std::vector<std::string>& features);
int discretize_value(const DiscretizerSpec& spec, int feature, double x);
Eigen::VectorXi discretize(const DiscretizerSpec& spec, const Sample& x);

void save_discretizer(const DiscretizerSpec& s, const std::string& path);
DiscretizerSpec load_discretizer(const std::string& path);

// Default allowed operation ranges for the canonical schema.
std::map<std::string, FeatureRange> default_discretizer_ranges();

// Synthetic data with a documented closed-form ground truth; a test fixture,
// not a claim about real networks.
extern const char* const kSyntheticVersion;
Dataset generate_synthetic(int n, uint64_t seed, double noise);
// Noise-free targets (Latency, Freeze, EFPS) for features in canonical order.
Eigen::Vector3d synthetic_targets(const Eigen::VectorXd& features);

}  // namespace qoeopt
