#include <doctest.h>

#include <sstream>

#include "csmap/io.hpp"
#include "csmap/rng.hpp"
#include "csmap/scenes.hpp"

using namespace csmap;

namespace {

const char* kScenarioText = R"json({
  "scene": {"builtin": "box-room"},
  "run": {"T": 12, "T_c": 4, "master_seed": 17},
  "channel": {"reflection_loss_db": 8.5},
  "noise": {"sigma_tau_s": 2e-10},
  "imu": {"sigma_step_m": 0.04, "bias_m": [0.01, 0.0, 0.0]},
  "bsm": {"sigma_fix_m": 0.12},
  "trajectories": {
    "uav_line": {"from": [6.5, 1.0, 1.2], "to": [9.0, 5.0, 2.4]},
    "gmt": [[2.0, 1.0, 1.0], [2.5, 1.5, 1.0], [3.0, 2.0, 1.0], [3.5, 2.5, 1.0]]
  },
  "lscn": {"K": 5, "stage1": [10], "stage2": [30, 40],
           "train": {"learning_rate": 0.002, "batch_size": 64, "epochs": 3, "rng_seed": 9}},
  "dataset": {"grid": {"x0": 1.0, "x1": 9.0, "nx": 4, "y0": 1.0, "y1": 7.0, "ny": 4,
                       "z_levels": [1.0, 2.0]},
              "tx": [[2.0, 2.0, 1.0]]}
})json";

}  // namespace

TEST_CASE("scenario parse picks up every section") {
  const ScenarioFile file = parse_scenario(kScenarioText);
  const Scenario& s = file.scenario;
  CHECK(s.total_steps == 12);
  CHECK(s.fix_interval == 4);
  CHECK(s.master_seed == 17);
  CHECK(s.k == 5);
  CHECK(s.channel.reflection_loss_db == 8.5);
  CHECK(s.channel.tx_power_dbm == 30.0);  // default preserved
  CHECK(s.noise.sigma_tau_s == 2e-10);
  CHECK(s.imu.sigma_step == 0.04);
  CHECK(s.bsm.sigma_fix == 0.12);
  CHECK(s.uav_waypoints.size() == 13);  // line expanded to T + 1
  CHECK(s.gmt_waypoints.size() == 4);
  CHECK(file.architecture.stage2_hidden == std::vector<int>{30, 40});
  CHECK(file.train.batch_size == 64);
  REQUIRE(s.dataset_grid.has_value());
  CHECK(s.dataset_grid->nx == 4);
  CHECK(s.dataset_tx_positions.size() == 1);
  validate_scenario(s);
}

TEST_CASE("scenario serialize/parse reaches a fixed point") {
  const ScenarioFile first = parse_scenario(kScenarioText);
  const std::string text1 = serialize_scenario(first);
  const ScenarioFile second = parse_scenario(text1);
  const std::string text2 = serialize_scenario(second);
  CHECK(text1 == text2);
  CHECK(second.scenario.uav_waypoints.size() == first.scenario.uav_waypoints.size());
  CHECK(second.scenario.imu.rng_seed == first.scenario.imu.rng_seed);
}

TEST_CASE("explicit facet scenes round-trip with materials") {
  const std::string text = R"json({
    "scene": {"facets": [
      {"id": 3, "vertices": [[0,0,0],[4,0,0],[4,0,3],[0,0,3]], "material": "brick"},
      {"id": 4, "vertices": [[0,0,0],[0,4,0],[0,4,3],[0,0,3]]}
    ]},
    "run": {"T": 1, "T_c": 1, "master_seed": 0},
    "trajectories": {"uav": [[1,1,1],[1.5,1,1]], "gmt": [[2,2,0.5],[2,2.5,0.5]]}
  })json";
  const ScenarioFile file = parse_scenario(text);
  CHECK(file.scenario.mesh.facets.size() == 2);
  CHECK(file.facet_materials.at(3) == "brick");
  const ScenarioFile again = parse_scenario(serialize_scenario(file));
  CHECK(again.facet_materials.at(3) == "brick");
  CHECK(serialize_scenario(again) == serialize_scenario(file));
}

TEST_CASE("malformed scenarios raise FormatError") {
  CHECK_THROWS_AS(parse_scenario("not json"), Error);
  CHECK_THROWS_AS(parse_scenario(R"({"run": {"T": 1, "T_c": 1}})"), Error);
  CHECK_THROWS_AS(parse_scenario(R"({"scene": {"builtin": "nope"},
                                     "run": {"T": 1, "T_c": 1}})"),
                  Error);
  try {
    parse_scenario(R"({"scene": {"builtin": "nope"}, "run": {"T": 1, "T_c": 1}})");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
  }
}

TEST_CASE("dataset round-trips bit-identically") {
  Dataset d;
  d.k = 2;
  d.features.resize(3, 6);
  Rng rng(88);
  for (Eigen::Index i = 0; i < d.features.size(); ++i) {
    d.features.data()[i] = rng.uniform(-1e-7, 1e-7);
  }
  d.labels = {0, 2, 1};
  const std::string text = serialize_dataset(d);
  const Dataset back = parse_dataset(text);
  CHECK(back.k == d.k);
  CHECK(back.labels == d.labels);
  CHECK((back.features - d.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(serialize_dataset(back) == text);
}

TEST_CASE("empty dataset file round-trips") {
  Dataset d;
  d.k = 3;
  d.features.resize(0, 9);
  const Dataset back = parse_dataset(serialize_dataset(d));
  CHECK(back.features.rows() == 0);
  CHECK(back.k == 3);
}

TEST_CASE("truncated dataset names the offending line") {
  Dataset d;
  d.k = 1;
  d.features.resize(2, 3);
  d.features << 1, 2, 3, 4, 5, 6;
  d.labels = {0, 1};
  std::string text = serialize_dataset(d);
  text.erase(text.rfind('\n', text.size() - 2) + 1);  // drop the last row
  try {
    parse_dataset(text);
    FAIL("expected FormatError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dataset("csmap-dataset v2\nk 1\nrows 0\n"), Error);
  CHECK_THROWS_AS(parse_dataset("csmap-dataset v1\nk 1\nrows 1\n1 2 3 9\n"), Error);
}

TEST_CASE("model files reload to identical parameters") {
  LscnModel model = init_model(Architecture{{6}, {8, 4}}, 3, 123);
  model.scaler = FeatureScaler(Eigen::VectorXd::Constant(9, -2.0),
                               Eigen::VectorXd::Constant(9, 3.0));
  const std::string text = serialize_model(model);
  const LscnModel back = parse_model(text);
  CHECK(back.k == model.k);
  REQUIRE(back.stage1.size() == model.stage1.size());
  REQUIRE(back.stage2.size() == model.stage2.size());
  for (std::size_t i = 0; i < model.stage2.size(); ++i) {
    CHECK((back.stage2[i].weights - model.stage2[i].weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.stage2[i].bias - model.stage2[i].bias).cwiseAbs().maxCoeff() == 0.0);
  }
  Eigen::VectorXd x(9);
  x << 0.1, -0.4, 0.9, 0.0, 0.2, -0.2, 0.5, 0.6, -0.9;
  CHECK((forward(model, model.scaler.apply(x)) - forward(back, back.scaler.apply(x)))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK_THROWS_AS(parse_model("{}"), Error);
  CHECK_THROWS_AS(parse_model(R"({"format": "csmap-model", "version": 2})"), Error);
}

TEST_CASE("ply output for an empty cloud") {
  const std::string text = serialize_ply(PointCloudMap{});
  CHECK(text.find("ply\nformat ascii 1.0\n") == 0);
  CHECK(text.find("element vertex 0\n") != std::string::npos);
  CHECK(text.find("end_header\n") != std::string::npos);
}

TEST_CASE("ply vertex lines carry four fields with the pairing error") {
  PointCloudMap map;
  map.points.push_back({{1, 2, 3}, Vec3{1, 2, 3.5}, 0, {0, 0, 0}});
  map.points.push_back({{4, 5, 6}, std::nullopt, 1, {0, 0, 0}});
  map.points.push_back({{-1, 0, 0.25}, Vec3{-1, 0, 0.25}, 2, {0, 0, 0}});
  const std::string text = serialize_ply(map);
  CHECK(text.find("element vertex 3\n") != std::string::npos);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line) && line != "end_header") {
  }
  int rows = 0;
  std::vector<double> errors;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    double x, y, z, e;
    REQUIRE((fields >> x >> y >> z >> e));
    std::string extra;
    CHECK_FALSE((fields >> extra));
    errors.push_back(e);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(errors[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(errors[1] == -1.0);
  CHECK(errors[2] == 0.0);

  PointCloudMap bad;
  bad.points.push_back({{std::nan(""), 0, 0}, std::nullopt, 0, {0, 0, 0}});
  CHECK_THROWS_AS(serialize_ply(bad), Error);
}

TEST_CASE("csv writers have frozen headers") {
  RunReport report;
  report.steps = 2;
  report.pose_errors = {0.1, 0.2};
  CHECK(serialize_metrics(report).rfind("metric,value\nschema_version,1\n", 0) == 0);
  CHECK(serialize_confusion(report).rfind(
            "true\\predicted,los,first_order_nlos,higher_order_nlos\n", 0) == 0);
  TrainHistory history(2);
  CHECK(serialize_history(history).rfind(
            "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n", 0) == 0);
  CHECK(serialize_sweep({}).rfind("k,train_accuracy,val_accuracy\n", 0) == 0);
}
