// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "qoeopt/dataset.hpp"
#include "qoeopt/rng.hpp"

using namespace qoeopt;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kTinyCsv =
    "FPS,Ping avg,Resolution,RSRP,SINR,RSRQ,RSSI,Ping Host Loss,PRBs,"
    "Latency,Freeze Percentage,EFPS\n"
    "60,20,1080p,-90,15,-10,-70,0.01,50,80,0.02,55\n"
    "30,40,0,-100,10,-12,-80,0.02,20,120,0.05,28\n"
    "120,10,4K,-85,20,-8,-65,0.005,90,60,0.01,110\n";

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("csv with three valid rows parses fully") {
  const std::string path = tmp_path("qoeopt_tiny.csv");
  write_file(path, kTinyCsv);
  std::vector<CsvReject> rejects;
  const Dataset d = load_csv(path, CsvSchema::canonical(), &rejects);
  CHECK(d.size() == 3);
  CHECK(rejects.empty());
  // resolution labels decoded to ordinals
  CHECK(d.features()(0, d.feature_index(feat::resolution)) == 1.0);
  CHECK(d.features()(2, d.feature_index(feat::resolution)) == 3.0);
}

TEST_CASE("missing column raises a schema error naming it") {
  const std::string path = tmp_path("qoeopt_missing.csv");
  write_file(path,
             "FPS,Resolution,RSRP,SINR,RSRQ,RSSI,Ping Host Loss,PRBs,"
             "Latency,Freeze Percentage,EFPS\n1,2,3,4,5,6,7,8,9,10,11\n");
  CHECK_THROWS_WITH_AS((void)load_csv(path, CsvSchema::canonical()),
                       doctest::Contains("Ping avg"), Error);
}

TEST_CASE("empty file raises an empty-input error") {
  const std::string path = tmp_path("qoeopt_empty.csv");
  write_file(path, "");
  CHECK_THROWS_AS((void)load_csv(path, CsvSchema::canonical()), Error);
}

TEST_CASE("rows with out-of-domain resolution indices are rejected") {
  const std::string path = tmp_path("qoeopt_badres.csv");
  write_file(path,
             "FPS,Ping avg,Resolution,RSRP,SINR,RSRQ,RSSI,Ping Host Loss,PRBs,"
             "Latency,Freeze Percentage,EFPS\n"
             "60,20,7,-90,15,-10,-70,0.01,50,80,0.02,55\n"
             "60,20,2,-90,15,-10,-70,0.01,50,80,0.02,55\n");
  std::vector<CsvReject> rejects;
  const Dataset d = load_csv(path, CsvSchema::canonical(), &rejects);
  CHECK(d.size() == 1);
  REQUIRE(rejects.size() == 1);
  CHECK(rejects[0].line == 2);
}

TEST_CASE("percent-marked freeze column is rescaled to a fraction") {
  const std::string path = tmp_path("qoeopt_pct.csv");
  write_file(path,
             "FPS,Ping avg,Resolution,RSRP,SINR,RSRQ,RSSI,Ping Host Loss,PRBs,"
             "Latency,Freeze %,EFPS\n60,20,0,-90,15,-10,-70,0.01,50,80,2.5,55\n");
  CsvSchema schema = CsvSchema::canonical();
  schema.target_columns["Freeze Percentage"] = "Freeze %";
  const Dataset d = load_csv(path, schema);
  CHECK(d.targets()(0, static_cast<int>(Kqi::freeze)) ==
        doctest::Approx(0.025));
}

TEST_CASE("generator output survives the csv round trip field by field") {
  const Dataset d = generate_synthetic(200, 9, 0.1);
  const std::string path = tmp_path("qoeopt_roundtrip.csv");
  save_csv(d, path);
  const Dataset r = load_csv(path, CsvSchema::canonical());
  REQUIRE(r.size() == d.size());
  for (const auto& name : d.feature_names()) {
    const int a = d.feature_index(name);
    const int b = r.feature_index(name);
    for (int i = 0; i < d.size(); ++i) {
      CHECK(d.features()(i, a) == r.features()(i, b));
    }
  }
  CHECK(d.targets() == r.targets());
}

TEST_CASE("synthetic export is byte identical across runs of the same seed") {
  const std::string p1 = tmp_path("qoeopt_synth_a.csv");
  const std::string p2 = tmp_path("qoeopt_synth_b.csv");
  save_csv(generate_synthetic(500, 1234, 0.2), p1);
  save_csv(generate_synthetic(500, 1234, 0.2), p2);
  CHECK(read_file(p1) == read_file(p2));
}

TEST_CASE("zero-noise targets equal the documented ground truth") {
  const Dataset d = generate_synthetic(300, 77, 0.0);
  for (int i = 0; i < d.size(); ++i) {
    const Eigen::Vector3d want =
        synthetic_targets(d.features().row(i).transpose());
    CHECK(d.targets()(i, 0) == want(0));
    CHECK(d.targets()(i, 1) == want(1));
    CHECK(d.targets()(i, 2) == want(2));
  }
}

TEST_CASE("generated efps correlates strongly with fps") {
  const Dataset d = generate_synthetic(5000, 3, 0.1);
  const Eigen::VectorXd fps = d.features().col(d.feature_index(feat::fps));
  const Eigen::VectorXd efps = d.target(Kqi::efps);
  const double cf = (fps.array() - fps.mean()).matrix().normalized().dot(
      (efps.array() - efps.mean()).matrix().normalized());
  CHECK(cf > 0.5);
}

TEST_CASE("iqr outlier filter removes a planted extreme target") {
  // concentrated targets so only the planted point crosses a fence
  Rng rng(5);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(100, 2);
  Eigen::MatrixXd targets(100, 3);
  for (int i = 0; i < 100; ++i) {
    targets(i, 0) = rng.uniform(50.0, 100.0);
    targets(i, 1) = rng.uniform(0.01, 0.03);
    targets(i, 2) = rng.uniform(25.0, 35.0);
  }

  // plant one latency value 100x the median
  std::vector<double> lat(targets.col(0).data(), targets.col(0).data() + 100);
  std::nth_element(lat.begin(), lat.begin() + 50, lat.end());
  targets(17, 0) = lat[50] * 100.0;
  Dataset planted({"a", "b"}, x, targets);

  // independent oracle: explicit quartile fence on the planted column
  std::vector<double> sorted(targets.col(0).data(),
                             targets.col(0).data() + 100);
  std::sort(sorted.begin(), sorted.end());
  auto quart = [&](double p) {
    const double h = p * 99.0;
    const size_t lo = static_cast<size_t>(h);
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
  };
  const double hi_fence = quart(0.75) + 1.5 * (quart(0.75) - quart(0.25));
  CHECK(targets(17, 0) > hi_fence);

  const Dataset filtered = remove_outliers(planted, 1.5);
  CHECK(filtered.size() == 99);
  CHECK(filtered.targets().col(0).maxCoeff() <= hi_fence);
}

TEST_CASE("identical targets are all retained despite zero iqr") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(20, 2);
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(20, 3, 4.0);
  const Dataset d({"a", "b"}, x, y);
  CHECK(remove_outliers(d, 1.5).size() == 20);
}

TEST_CASE("infinite iqr factor keeps everything") {
  const Dataset d = generate_synthetic(250, 8, 0.3);
  CHECK(remove_outliers(d, std::numeric_limits<double>::infinity()).size() ==
        250);
}

TEST_CASE("outlier filter is idempotent when fences are frozen") {
  const Dataset d = generate_synthetic(400, 21, 0.4);
  const TargetFences fences = target_fences(d, 1.5);
  const Dataset once = filter_by_fences(d, fences);
  const Dataset twice = filter_by_fences(once, fences);
  CHECK(once.size() == twice.size());
  CHECK(once.targets() == twice.targets());
}

TEST_CASE("resolution encoding") {
  CHECK(encode_resolution("720p") == 0);
  CHECK(encode_resolution("1080p") == 1);
  CHECK(encode_resolution("1440p") == 2);
  CHECK(encode_resolution("4K") == 3);
  CHECK(encode_resolution("4k") == 3);
  CHECK(encode_resolution(" 1080P ") == 1);
  CHECK_THROWS_AS((void)encode_resolution("8K"), Error);
  CHECK(resolution_label(2) == "1440p");
}

TEST_CASE("split sizes follow the floor/remainder rule") {
  const Dataset d = assign_splits(generate_synthetic(3467, 1, 0.1),
                                  SplitFractions{}, 7);
  const int train = static_cast<int>(d.split_rows(Split::train).size());
  const int val = static_cast<int>(d.split_rows(Split::val).size());
  const int test = static_cast<int>(d.split_rows(Split::test).size());
  CHECK(train + val + test == 3467);
  CHECK(std::abs(train - 2427) <= 1);
  CHECK(std::abs(val - 520) <= 1);
  CHECK(std::abs(test - 520) <= 1);

  const Dataset d10 =
      assign_splits(generate_synthetic(10, 2, 0.1), SplitFractions{}, 3);
  CHECK(d10.split_rows(Split::train).size() == 7);
  CHECK(d10.split_rows(Split::val).size() == 1);
  CHECK(d10.split_rows(Split::test).size() == 2);
}

TEST_CASE("splits are deterministic and partition the dataset") {
  const Dataset a = assign_splits(generate_synthetic(500, 4, 0.1),
                                  SplitFractions{}, 99);
  const Dataset b = assign_splits(generate_synthetic(500, 4, 0.1),
                                  SplitFractions{}, 99);
  CHECK(a.splits() == b.splits());

  // partition: every row tagged exactly once by construction; check counts
  const int n = static_cast<int>(a.split_rows(Split::train).size() +
                                 a.split_rows(Split::val).size() +
                                 a.split_rows(Split::test).size());
  CHECK(n == 500);
}

TEST_CASE("too-small datasets cannot be split") {
  CHECK_THROWS_AS(
      (void)assign_splits(generate_synthetic(9, 1, 0.0), SplitFractions{}, 1),
      Error);
}

TEST_CASE("scaler maps the fit range onto [0,1] and clamps outside it") {
  Eigen::MatrixXd x(3, 1);
  x << 10.0, 20.0, 30.0;
  Eigen::MatrixXd y = Eigen::MatrixXd::Ones(3, 3);
  Dataset d({"f"}, x, y);
  d.set_splits({Split::train, Split::train, Split::train});

  const ScalerSpec s = fit_scaler(d, {"f"});
  CHECK(scale_value(s, 0, 20.0) == doctest::Approx(0.5));
  CHECK(scale_value(s, 0, 10.0) == 0.0);
  CHECK(scale_value(s, 0, 35.0) == 1.0);  // clamped
  CHECK(scale_value(s, 0, -5.0) == 0.0);  // clamped

  // round trip within the fit range
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.uniform(10.0, 30.0);
    const double back = unscale_value(s, 0, scale_value(s, 0, v));
    CHECK(std::abs(back - v) / std::abs(v) < 1e-12);
  }
}

TEST_CASE("constant features are rejected by the scaler") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(5, 1, 2.0);
  Eigen::MatrixXd y = Eigen::MatrixXd::Ones(5, 3);
  Dataset d({"flat"}, x, y);
  d.set_splits(std::vector<Split>(5, Split::train));
  CHECK_THROWS_WITH_AS((void)fit_scaler(d, {"flat"}),
                       doctest::Contains("flat"), Error);
}

TEST_CASE("discretizer follows the integer-grid rule") {
  std::map<std::string, FeatureRange> ranges;
  ranges["c"] = FeatureRange{0.0, 100.0, false};   // continuous, 100 values
  ranges["prb"] = FeatureRange{1.0, 106.0, true};  // discrete, 105 values
  const DiscretizerSpec s = fit_discretizer({"c", "prb"}, ranges);

  CHECK(s.n_vals(0) == 100);
  CHECK(s.n_vals(1) == 105);
  CHECK(discretize_value(s, 0, 50.0) == 50);
  CHECK(discretize_value(s, 0, 100.0) == 99);  // clamped below n
  CHECK(discretize_value(s, 0, 0.0) == 0);
  CHECK(discretize_value(s, 1, 1.0) == 0);

  CHECK_THROWS_AS((void)discretize_value(s, 0, std::nan("")), Error);

  // containment for arbitrary inputs, including far out of range
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-500.0, 500.0);
    const int idx = discretize_value(s, 0, v);
    CHECK(idx >= 0);
    CHECK(idx < 100);
  }
}

TEST_CASE("samples expose features by canonical name") {
  const Dataset d = generate_synthetic(5, 2, 0.0);
  const Sample s = d.sample(0);
  CHECK(s.features.size() == 9);
  CHECK(s.features.count(feat::prbs) == 1);
  CHECK(s.target(Kqi::latency) == s.latency);
}

TEST_CASE("processed csv with split column restores tags") {
  Dataset d = assign_splits(generate_synthetic(50, 6, 0.1), SplitFractions{}, 5);
  const std::string path = tmp_path("qoeopt_split.csv");
  save_csv(d, path, /*include_split=*/true);
  const Dataset r = load_csv(path, CsvSchema::canonical());
  REQUIRE(r.has_splits());
  CHECK(r.splits() == d.splits());
}

}  // TEST_SUITE
