// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qoeopt/rng.hpp"

namespace qoeopt {

namespace {

constexpr const char* kKqiNames[kNumKqis] = {"Latency", "Freeze Percentage",
                                             "EFPS"};

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

// type-7 quantile (linear interpolation) on already sorted values
double quantile_sorted(const std::vector<double>& v, double p) {
  const size_t n = v.size();
  if (n == 1) return v[0];
  const double h = p * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= n) return v[n - 1];
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace

const char* kqi_name(Kqi k) { return kKqiNames[static_cast<int>(k)]; }

Kqi kqi_from_name(std::string_view name) {
  const std::string lower = to_lower(name);
  for (int i = 0; i < kNumKqis; ++i) {
    if (lower == to_lower(kKqiNames[i])) return static_cast<Kqi>(i);
  }
  // short aliases used on the CLI
  if (lower == "freeze") return Kqi::freeze;
  throw Error(Errc::invalid_value, "unknown KQI name: " + std::string(name));
}

std::vector<std::string> default_feature_names() {
  return {feat::fps,  feat::ping_avg, feat::resolution,
          feat::rsrp, feat::sinr,     feat::rsrq,
          feat::rssi, feat::ping_host_loss, feat::prbs};
}

double Sample::target(Kqi k) const {
  switch (k) {
    case Kqi::latency: return latency;
    case Kqi::freeze: return freeze;
    case Kqi::efps: return efps;
  }
  return 0.0;
}

Dataset::Dataset(std::vector<std::string> feature_names,
                 Eigen::MatrixXd features, Eigen::MatrixXd targets)
    : feature_names_(std::move(feature_names)),
      features_(std::move(features)),
      targets_(std::move(targets)) {
  if (features_.rows() != targets_.rows()) {
    throw Error(Errc::invalid_value, "feature/target row count mismatch");
  }
  if (features_.cols() != static_cast<Eigen::Index>(feature_names_.size())) {
    throw Error(Errc::invalid_value, "feature name/column count mismatch");
  }
  if (targets_.cols() != kNumKqis) {
    throw Error(Errc::invalid_value, "expected 3 target columns");
  }
}

int Dataset::feature_index(std::string_view name) const {
  for (size_t i = 0; i < feature_names_.size(); ++i) {
    if (feature_names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void Dataset::set_splits(std::vector<Split> s) {
  if (static_cast<int>(s.size()) != size()) {
    throw Error(Errc::invalid_value, "split tag count mismatch");
  }
  splits_ = std::move(s);
}

Sample Dataset::sample(int i) const {
  Sample s;
  for (size_t f = 0; f < feature_names_.size(); ++f) {
    s.features[feature_names_[f]] = features_(i, static_cast<int>(f));
  }
  s.latency = targets_(i, 0);
  s.freeze = targets_(i, 1);
  s.efps = targets_(i, 2);
  return s;
}

std::vector<int> Dataset::split_rows(Split s) const {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(splits_.size()); ++i) {
    if (splits_[i] == s) rows.push_back(i);
  }
  return rows;
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Eigen::MatrixXd x(static_cast<int>(rows.size()), num_features());
  Eigen::MatrixXd y(static_cast<int>(rows.size()), kNumKqis);
  std::vector<Split> tags;
  tags.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<int>(i)) = features_.row(rows[i]);
    y.row(static_cast<int>(i)) = targets_.row(rows[i]);
    if (has_splits()) tags.push_back(splits_[rows[i]]);
  }
  Dataset out(feature_names_, std::move(x), std::move(y));
  if (has_splits()) out.set_splits(std::move(tags));
  out.provenance = provenance;
  return out;
}

Dataset Dataset::select_features(const std::vector<std::string>& names) const {
  Eigen::MatrixXd x(size(), static_cast<int>(names.size()));
  for (size_t j = 0; j < names.size(); ++j) {
    const int col = feature_index(names[j]);
    if (col < 0) {
      throw Error(Errc::schema_error, "unknown feature: " + names[j]);
    }
    x.col(static_cast<int>(j)) = features_.col(col);
  }
  Dataset out(names, std::move(x), targets_);
  out.splits_ = splits_;
  out.provenance = provenance;
  return out;
}

CsvSchema CsvSchema::canonical() {
  CsvSchema s;
  for (const auto& name : default_feature_names()) {
    s.feature_columns[name] = name;
  }
  for (int i = 0; i < kNumKqis; ++i) {
    s.target_columns[kKqiNames[i]] = kKqiNames[i];
  }
  return s;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 std::vector<CsvReject>* rejects) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::empty_input, "empty CSV: " + path);
  }
  const std::vector<std::string> header = split_csv_line(line);

  auto find_col = [&](const std::string& header_name) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == header_name) return static_cast<int>(i);
    }
    return -1;
  };

  // canonical ordering first, then any extra schema entries
  std::vector<std::string> ordered;
  for (const auto& name : default_feature_names()) {
    if (schema.feature_columns.count(name)) ordered.push_back(name);
  }
  for (const auto& [canonical, column] : schema.feature_columns) {
    if (std::find(ordered.begin(), ordered.end(), canonical) == ordered.end()) {
      ordered.push_back(canonical);
    }
  }

  std::vector<std::string> feature_names;
  std::vector<int> feature_cols;
  for (const auto& canonical : ordered) {
    const std::string& column = schema.feature_columns.at(canonical);
    const int col = find_col(column);
    if (col < 0) {
      throw Error(Errc::schema_error, "missing column: " + column);
    }
    feature_names.push_back(canonical);
    feature_cols.push_back(col);
  }

  int target_cols[kNumKqis];
  bool freeze_is_percent = false;
  for (int k = 0; k < kNumKqis; ++k) {
    const auto it = schema.target_columns.find(kKqiNames[k]);
    if (it == schema.target_columns.end()) {
      throw Error(Errc::schema_error,
                  std::string("schema missing target: ") + kKqiNames[k]);
    }
    target_cols[k] = find_col(it->second);
    if (target_cols[k] < 0) {
      throw Error(Errc::schema_error, "missing column: " + it->second);
    }
    if (k == static_cast<int>(Kqi::freeze) &&
        it->second.find('%') != std::string::npos) {
      freeze_is_percent = true;
    }
  }

  const int split_col = find_col("split");
  const int res_feature =
      static_cast<int>(std::find(feature_names.begin(), feature_names.end(),
                                 feat::resolution) -
                       feature_names.begin());

  std::vector<Eigen::VectorXd> feat_rows;
  std::vector<Eigen::Vector3d> target_rows;
  std::vector<Split> tags;
  bool any_tags = false;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    auto reject = [&](const std::string& why) {
      if (rejects) rejects->push_back({line_no, why});
    };

    Eigen::VectorXd x(static_cast<int>(feature_names.size()));
    bool ok = true;
    for (size_t f = 0; f < feature_cols.size(); ++f) {
      if (feature_cols[f] >= static_cast<int>(cells.size())) {
        reject("too few cells");
        ok = false;
        break;
      }
      const std::string& cell = cells[feature_cols[f]];
      double v = 0.0;
      if (!parse_double(cell, v)) {
        if (static_cast<int>(f) == res_feature) {
          try {
            v = static_cast<double>(encode_resolution(trim(cell)));
          } catch (const Error&) {
            reject("bad resolution label '" + trim(cell) + "'");
            ok = false;
            break;
          }
        } else {
          reject("unparseable value in " + feature_names[f]);
          ok = false;
          break;
        }
      }
      if (!std::isfinite(v)) {
        reject("non-finite value in " + feature_names[f]);
        ok = false;
        break;
      }
      if (static_cast<int>(f) == res_feature &&
          v != 0.0 && v != 1.0 && v != 2.0 && v != 3.0) {
        reject("resolution index outside {0,1,2,3}");
        ok = false;
        break;
      }
      x(static_cast<int>(f)) = v;
    }
    if (!ok) continue;

    Eigen::Vector3d y;
    for (int k = 0; k < kNumKqis; ++k) {
      if (target_cols[k] >= static_cast<int>(cells.size())) {
        reject("too few cells");
        ok = false;
        break;
      }
      double v = 0.0;
      if (!parse_double(cells[target_cols[k]], v) || !std::isfinite(v)) {
        reject(std::string("unparseable value in ") + kKqiNames[k]);
        ok = false;
        break;
      }
      if (k == static_cast<int>(Kqi::freeze) && freeze_is_percent) v /= 100.0;
      if (v < 0.0) {
        reject(std::string("negative target ") + kKqiNames[k]);
        ok = false;
        break;
      }
      y(k) = v;
    }
    if (!ok) continue;

    if (split_col >= 0 && split_col < static_cast<int>(cells.size())) {
      const std::string tag = to_lower(trim(cells[split_col]));
      if (tag == "train") tags.push_back(Split::train);
      else if (tag == "val") tags.push_back(Split::val);
      else if (tag == "test") tags.push_back(Split::test);
      else {
        reject("unknown split tag '" + tag + "'");
        continue;
      }
      any_tags = true;
    }

    feat_rows.push_back(std::move(x));
    target_rows.push_back(y);
  }

  if (feat_rows.empty()) {
    throw Error(Errc::empty_input, "no parseable rows in " + path);
  }

  Eigen::MatrixXd x(static_cast<int>(feat_rows.size()),
                    static_cast<int>(feature_names.size()));
  Eigen::MatrixXd y(static_cast<int>(feat_rows.size()), kNumKqis);
  for (size_t i = 0; i < feat_rows.size(); ++i) {
    x.row(static_cast<int>(i)) = feat_rows[i].transpose();
    y.row(static_cast<int>(i)) = target_rows[i].transpose();
  }
  Dataset d(std::move(feature_names), std::move(x), std::move(y));
  if (any_tags && tags.size() == feat_rows.size()) d.set_splits(std::move(tags));
  d.provenance.csv_path = path;
  return d;
}

void save_csv(const Dataset& d, const std::string& path, bool include_split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);

  std::string buf;
  for (const auto& name : d.feature_names()) {
    buf += name;
    buf += ',';
  }
  for (int k = 0; k < kNumKqis; ++k) {
    buf += kKqiNames[k];
    if (k + 1 < kNumKqis) buf += ',';
  }
  if (include_split) buf += ",split";
  buf += '\n';

  static constexpr const char* kSplitNames[3] = {"train", "val", "test"};
  for (int i = 0; i < d.size(); ++i) {
    for (int f = 0; f < d.num_features(); ++f) {
      format_double(buf, d.features()(i, f));
      buf += ',';
    }
    for (int k = 0; k < kNumKqis; ++k) {
      format_double(buf, d.targets()(i, k));
      if (k + 1 < kNumKqis) buf += ',';
    }
    if (include_split) {
      buf += ',';
      buf += kSplitNames[static_cast<int>(d.splits()[i])];
    }
    buf += '\n';
  }
  out << buf;
}

TargetFences target_fences(const Dataset& d, double iqr_factor) {
  if (d.size() == 0) throw Error(Errc::empty_input, "empty dataset");
  TargetFences f;
  for (int k = 0; k < kNumKqis; ++k) {
    std::vector<double> v(d.targets().col(k).data(),
                          d.targets().col(k).data() + d.size());
    std::sort(v.begin(), v.end());
    const double q1 = quantile_sorted(v, 0.25);
    const double q3 = quantile_sorted(v, 0.75);
    const double iqr = q3 - q1;
    f.lo(k) = q1 - iqr_factor * iqr;
    f.hi(k) = q3 + iqr_factor * iqr;
    if (std::isinf(iqr_factor)) {
      f.lo(k) = -std::numeric_limits<double>::infinity();
      f.hi(k) = std::numeric_limits<double>::infinity();
    }
  }
  return f;
}

Dataset filter_by_fences(const Dataset& d, const TargetFences& f) {
  std::vector<int> keep;
  for (int i = 0; i < d.size(); ++i) {
    bool ok = true;
    for (int k = 0; k < kNumKqis; ++k) {
      const double v = d.targets()(i, k);
      if (v < f.lo(k) || v > f.hi(k)) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(i);
  }
  if (keep.empty()) {
    throw Error(Errc::degenerate_filter, "outlier filter removed every sample");
  }
  return d.subset(keep);
}

Dataset remove_outliers(const Dataset& d, double iqr_factor) {
  return filter_by_fences(d, target_fences(d, iqr_factor));
}

int encode_resolution(std::string_view label) {
  const std::string l = to_lower(trim(std::string(label)));
  if (l == "720p") return 0;
  if (l == "1080p") return 1;
  if (l == "1440p") return 2;
  if (l == "4k") return 3;
  throw Error(Errc::encoding_error,
              "unknown resolution label: " + std::string(label));
}

std::string resolution_label(int index) {
  switch (index) {
    case 0: return "720p";
    case 1: return "1080p";
    case 2: return "1440p";
    case 3: return "4k";
  }
  throw Error(Errc::encoding_error,
              "resolution index out of range: " + std::to_string(index));
}

Dataset assign_splits(Dataset d, const SplitFractions& fractions,
                      uint64_t seed) {
  const double sum = fractions.train + fractions.val + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::config_error, "split fractions must sum to 1");
  }
  const int n = d.size();
  if (n < 10) {
    throw Error(Errc::too_small, "need at least 10 samples to split");
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const int n_train = static_cast<int>(std::floor(fractions.train * n));
  const int n_val = static_cast<int>(std::floor(fractions.val * n));

  std::vector<Split> tags(n, Split::test);
  for (int i = 0; i < n_train; ++i) tags[order[i]] = Split::train;
  for (int i = n_train; i < n_train + n_val; ++i) tags[order[i]] = Split::val;
  d.set_splits(std::move(tags));
  return d;
}

int ScalerSpec::index_of(std::string_view name) const {
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i] == name) return static_cast<int>(i);
  }
  return -1;
}

ScalerSpec fit_scaler(const Dataset& d,
                      const std::vector<std::string>& features) {
  if (!d.has_splits()) {
    throw Error(Errc::invalid_value, "scaler must be fit on the train split");
  }
  const std::vector<int> rows = d.split_rows(Split::train);
  if (rows.empty()) throw Error(Errc::empty_input, "empty train split");

  ScalerSpec s;
  s.features = features;
  s.x_min.resize(static_cast<int>(features.size()));
  s.x_max.resize(static_cast<int>(features.size()));
  for (size_t f = 0; f < features.size(); ++f) {
    const int col = d.feature_index(features[f]);
    if (col < 0) throw Error(Errc::schema_error, "unknown feature: " + features[f]);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int r : rows) {
      lo = std::min(lo, d.features()(r, col));
      hi = std::max(hi, d.features()(r, col));
    }
    if (!(hi > lo)) {
      throw Error(Errc::degenerate_feature,
                  "constant feature in train split: " + features[f]);
    }
    s.x_min(static_cast<int>(f)) = lo;
    s.x_max(static_cast<int>(f)) = hi;
  }
  return s;
}

double scale_value(const ScalerSpec& s, int feature, double x) {
  if (!std::isfinite(x)) {
    throw Error(Errc::invalid_value,
                "non-finite input to scaler: " + s.features[feature]);
  }
  const double v = (x - s.x_min(feature)) / (s.x_max(feature) - s.x_min(feature));
  return std::clamp(v, 0.0, 1.0);
}

double unscale_value(const ScalerSpec& s, int feature, double scaled) {
  return s.x_min(feature) + scaled * (s.x_max(feature) - s.x_min(feature));
}

Eigen::VectorXd apply_scaler(const ScalerSpec& s, const Sample& x) {
  Eigen::VectorXd out(static_cast<int>(s.features.size()));
  for (size_t f = 0; f < s.features.size(); ++f) {
    const auto it = x.features.find(s.features[f]);
    if (it == x.features.end()) {
      throw Error(Errc::schema_error, "sample missing feature: " + s.features[f]);
    }
    out(static_cast<int>(f)) = scale_value(s, static_cast<int>(f), it->second);
  }
  return out;
}

Eigen::MatrixXd apply_scaler(const ScalerSpec& s, const Dataset& d,
                             const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<int>(rows.size()),
                      static_cast<int>(s.features.size()));
  for (size_t f = 0; f < s.features.size(); ++f) {
    const int col = d.feature_index(s.features[f]);
    if (col < 0) throw Error(Errc::schema_error, "unknown feature: " + s.features[f]);
    for (size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<int>(i), static_cast<int>(f)) =
          scale_value(s, static_cast<int>(f), d.features()(rows[i], col));
    }
  }
  return out;
}

int DiscretizerSpec::index_of(std::string_view name) const {
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i] == name) return static_cast<int>(i);
  }
  return -1;
}

DiscretizerSpec fit_discretizer(
    const std::vector<std::string>& features,
    const std::map<std::string, FeatureRange>& ranges) {
  DiscretizerSpec s;
  s.features = features;
  const int f = static_cast<int>(features.size());
  s.x_min.resize(f);
  s.x_max.resize(f);
  s.n_vals.resize(f);
  for (int i = 0; i < f; ++i) {
    const auto it = ranges.find(features[i]);
    if (it == ranges.end()) {
      throw Error(Errc::config_error,
                  "no allowed range configured for feature: " + features[i]);
    }
    const FeatureRange& r = it->second;
    if (!(r.max_allowed > r.min_allowed)) {
      throw Error(Errc::config_error,
                  "allowed range must satisfy max > min for " + features[i]);
    }
    s.x_min(i) = r.min_allowed;
    s.x_max(i) = r.max_allowed;
    s.n_vals(i) = r.discrete
                      ? static_cast<int>(std::lround(r.max_allowed - r.min_allowed))
                      : DiscretizerSpec::kContinuousVals;
    if (s.n_vals(i) < 1) {
      throw Error(Errc::config_error, "empty grid for feature " + features[i]);
    }
  }
  return s;
}

DiscretizerSpec subset_discretizer(const DiscretizerSpec& spec,
                                   const std::vector<std::string>& features) {
  DiscretizerSpec s;
  s.features = features;
  const int f = static_cast<int>(features.size());
  s.x_min.resize(f);
  s.x_max.resize(f);
  s.n_vals.resize(f);
  for (int i = 0; i < f; ++i) {
    const int j = spec.index_of(features[i]);
    if (j < 0) {
      throw Error(Errc::config_error,
                  "discretizer has no feature: " + features[i]);
    }
    s.x_min(i) = spec.x_min(j);
    s.x_max(i) = spec.x_max(j);
    s.n_vals(i) = spec.n_vals(j);
  }
  return s;
}

int discretize_value(const DiscretizerSpec& spec, int feature, double x) {
  if (std::isnan(x)) {
    throw Error(Errc::invalid_value,
                "NaN input to discretizer: " + spec.features[feature]);
  }
  const double scaled = (x - spec.x_min(feature)) /
                        (spec.x_max(feature) - spec.x_min(feature)) *
                        static_cast<double>(spec.n_vals(feature));
  const long idx = std::lround(scaled);
  return static_cast<int>(
      std::clamp<long>(idx, 0, static_cast<long>(spec.n_vals(feature)) - 1));
}

Eigen::VectorXi discretize(const DiscretizerSpec& spec, const Sample& x) {
  Eigen::VectorXi out(static_cast<int>(spec.features.size()));
  for (size_t f = 0; f < spec.features.size(); ++f) {
    const auto it = x.features.find(spec.features[f]);
    if (it == x.features.end()) {
      throw Error(Errc::schema_error,
                  "sample missing feature: " + spec.features[f]);
    }
    out(static_cast<int>(f)) =
        discretize_value(spec, static_cast<int>(f), it->second);
  }
  return out;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(static_cast<int>(a.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = a[static_cast<size_t>(i)].get<double>();
  return v;
}

}  // namespace

void save_scaler(const ScalerSpec& s, const std::string& path) {
  nlohmann::json j;
  j["format"] = "qoeopt-scaler-v1";
  j["features"] = s.features;
  j["x_min"] = vector_to_json(s.x_min);
  j["x_max"] = vector_to_json(s.x_max);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
}

ScalerSpec load_scaler(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  nlohmann::json j;
  in >> j;
  ScalerSpec s;
  s.features = j.at("features").get<std::vector<std::string>>();
  s.x_min = vector_from_json(j.at("x_min"));
  s.x_max = vector_from_json(j.at("x_max"));
  return s;
}

void save_discretizer(const DiscretizerSpec& s, const std::string& path) {
  nlohmann::json j;
  j["format"] = "qoeopt-discretizer-v1";
  j["features"] = s.features;
  j["x_min"] = vector_to_json(s.x_min);
  j["x_max"] = vector_to_json(s.x_max);
  std::vector<int> n(s.n_vals.data(), s.n_vals.data() + s.n_vals.size());
  j["n_vals"] = n;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
}

DiscretizerSpec load_discretizer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  nlohmann::json j;
  in >> j;
  DiscretizerSpec s;
  s.features = j.at("features").get<std::vector<std::string>>();
  s.x_min = vector_from_json(j.at("x_min"));
  s.x_max = vector_from_json(j.at("x_max"));
  const auto n = j.at("n_vals").get<std::vector<int>>();
  s.n_vals.resize(static_cast<int>(n.size()));
  for (size_t i = 0; i < n.size(); ++i) s.n_vals(static_cast<int>(i)) = n[i];
  return s;
}

std::map<std::string, FeatureRange> default_discretizer_ranges() {
  return {
      {feat::fps, {30.0, 120.0, false}},
      {feat::ping_avg, {0.0, 150.0, false}},
      {feat::resolution, {0.0, 4.0, true}},
      {feat::rsrp, {-130.0, -60.0, false}},
      {feat::sinr, {-5.0, 35.0, false}},
      {feat::rsrq, {-25.0, 0.0, false}},
      {feat::rssi, {-110.0, -50.0, false}},
      {feat::ping_host_loss, {0.0, 0.1, false}},
      {feat::prbs, {1.0, 106.0, true}},
  };
}

}  // namespace qoeopt
