#include "csmap/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csmap/rng.hpp"
#include "csmap/scenes.hpp"

namespace csmap {
namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const json& require(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::FormatError,
                std::string("missing '") + key + "' in " + where);
  }
  return *it;
}

Vec3 vec3_from(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::FormatError,
                std::string("expected [x, y, z] in ") + where);
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

std::vector<Vec3> waypoints_from(const json& j, const char* where) {
  std::vector<Vec3> pts;
  if (!j.is_array()) {
    throw Error(ErrorCode::FormatError, std::string("expected waypoint list in ") + where);
  }
  for (const json& p : j) pts.push_back(vec3_from(p, where));
  return pts;
}

std::vector<Vec3> interpolate_line(const Vec3& from, const Vec3& to, int count) {
  std::vector<Vec3> pts;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    pts.push_back(from + (to - from) * f);
  }
  return pts;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FormatError, std::string("scenario is not valid JSON: ") + e.what());
  }
  ScenarioFile file;
  Scenario& s = file.scenario;

  const json& scene = require(root, "scene", "scenario");
  if (scene.contains("builtin")) {
    file.builtin_name = scene["builtin"].get<std::string>();
    s.mesh = builtin_scene(*file.builtin_name);
  } else if (scene.contains("facets")) {
    std::vector<Facet> facets;
    for (const json& jf : scene["facets"]) {
      const int id = require(jf, "id", "facet").get<int>();
      std::vector<Vec3> vertices;
      for (const json& jv : require(jf, "vertices", "facet")) {
        vertices.push_back(vec3_from(jv, "facet vertex"));
      }
      try {
        facets.push_back(make_facet(id, std::move(vertices)));
      } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::FormatError,
                    "facet " + std::to_string(id) + ": " + e.what());
      }
      if (jf.contains("material")) {
        file.facet_materials[id] = jf["material"].get<std::string>();
      }
    }
    try {
      s.mesh = make_mesh(std::move(facets));
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorCode::FormatError, e.what());
    }
    if (s.mesh.facets.empty()) {
      throw Error(ErrorCode::FormatError, "scene facet list is empty");
    }
  } else {
    throw Error(ErrorCode::FormatError, "scene needs 'builtin' or 'facets'");
  }

  const json& run = require(root, "run", "scenario");
  s.total_steps = require(run, "T", "run").get<int>();
  s.fix_interval = require(run, "T_c", "run").get<int>();
  s.master_seed = get_or<std::uint64_t>(run, "master_seed", 0);

  if (root.contains("channel")) {
    const json& c = root["channel"];
    s.channel.tx_power_dbm = get_or(c, "tx_power_dbm", s.channel.tx_power_dbm);
    s.channel.carrier_hz = get_or(c, "carrier_hz", s.channel.carrier_hz);
    s.channel.reflection_loss_db = get_or(c, "reflection_loss_db", s.channel.reflection_loss_db);
    s.channel.noise_floor_dbm = get_or(c, "noise_floor_dbm", s.channel.noise_floor_dbm);
    s.channel.max_order = get_or(c, "max_order", s.channel.max_order);
  }
  if (root.contains("noise")) {
    const json& n = root["noise"];
    s.noise.sigma_tau_s = get_or(n, "sigma_tau_s", s.noise.sigma_tau_s);
    s.noise.sigma_theta_rad = get_or(n, "sigma_theta_rad", s.noise.sigma_theta_rad);
    s.noise.sigma_phi_rad = get_or(n, "sigma_phi_rad", s.noise.sigma_phi_rad);
    s.noise.pad_snr_db = get_or(n, "pad_snr_db", s.noise.pad_snr_db);
  }
  if (root.contains("imu")) {
    const json& i = root["imu"];
    s.imu.sigma_step = get_or(i, "sigma_step_m", 0.0);
    if (i.contains("bias_m")) s.imu.bias = vec3_from(i["bias_m"], "imu.bias_m");
    s.imu.rng_seed = get_or<std::uint64_t>(
        i, "rng_seed", derive_seed(s.master_seed, SeedStream::Imu, 0));
  } else {
    s.imu.rng_seed = derive_seed(s.master_seed, SeedStream::Imu, 0);
  }
  if (root.contains("bsm")) {
    const json& b = root["bsm"];
    s.bsm.sigma_fix = get_or(b, "sigma_fix_m", 0.0);
    s.bsm.rng_seed = get_or<std::uint64_t>(
        b, "rng_seed", derive_seed(s.master_seed, SeedStream::Bsm, 0));
  } else {
    s.bsm.rng_seed = derive_seed(s.master_seed, SeedStream::Bsm, 0);
  }

  if (root.contains("trajectories")) {
    const json& t = root["trajectories"];
    if (t.contains("uav")) {
      s.uav_waypoints = waypoints_from(t["uav"], "trajectories.uav");
    } else if (t.contains("uav_line")) {
      const json& l = t["uav_line"];
      s.uav_waypoints = interpolate_line(vec3_from(require(l, "from", "uav_line"), "uav_line"),
                                         vec3_from(require(l, "to", "uav_line"), "uav_line"),
                                         s.total_steps + 1);
    }
    if (t.contains("gmt")) {
      s.gmt_waypoints = waypoints_from(t["gmt"], "trajectories.gmt");
    } else if (t.contains("gmt_line")) {
      const json& l = t["gmt_line"];
      s.gmt_waypoints = interpolate_line(vec3_from(require(l, "from", "gmt_line"), "gmt_line"),
                                         vec3_from(require(l, "to", "gmt_line"), "gmt_line"),
                                         s.total_steps / s.fix_interval + 1);
    }
  }

  if (root.contains("lscn")) {
    const json& l = root["lscn"];
    s.k = get_or(l, "K", s.k);
    if (l.contains("stage1")) {
      file.architecture.stage1_sizes = l["stage1"].get<std::vector<int>>();
    }
    if (l.contains("stage2")) {
      file.architecture.stage2_hidden = l["stage2"].get<std::vector<int>>();
    }
    if (l.contains("train")) {
      const json& tr = l["train"];
      file.train.learning_rate = get_or(tr, "learning_rate", file.train.learning_rate);
      file.train.batch_size = get_or(tr, "batch_size", file.train.batch_size);
      file.train.epochs = get_or(tr, "epochs", file.train.epochs);
      file.train.rng_seed = get_or<std::uint64_t>(tr, "rng_seed", file.train.rng_seed);
    }
  }

  if (root.contains("dataset")) {
    const json& d = root["dataset"];
    const json& g = require(d, "grid", "dataset");
    GridSpec grid;
    grid.x0 = require(g, "x0", "grid").get<double>();
    grid.x1 = require(g, "x1", "grid").get<double>();
    grid.nx = require(g, "nx", "grid").get<int>();
    grid.y0 = require(g, "y0", "grid").get<double>();
    grid.y1 = require(g, "y1", "grid").get<double>();
    grid.ny = require(g, "ny", "grid").get<int>();
    grid.z_levels = require(g, "z_levels", "grid").get<std::vector<double>>();
    s.dataset_grid = grid;
    for (const json& p : require(d, "tx", "dataset")) {
      s.dataset_tx_positions.push_back(vec3_from(p, "dataset.tx"));
    }
  }
  return file;
}

std::string serialize_scenario(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  json root;
  if (file.builtin_name) {
    root["scene"] = {{"builtin", *file.builtin_name}};
  } else {
    json facets = json::array();
    for (const Facet& f : s.mesh.facets) {
      json jf;
      jf["id"] = f.facet_id;
      json verts = json::array();
      for (const Vec3& v : f.vertices) verts.push_back(vec3_to(v));
      jf["vertices"] = verts;
      auto mat = file.facet_materials.find(f.facet_id);
      if (mat != file.facet_materials.end()) jf["material"] = mat->second;
      facets.push_back(jf);
    }
    root["scene"] = {{"facets", facets}};
  }
  root["run"] = {{"T", s.total_steps},
                 {"T_c", s.fix_interval},
                 {"master_seed", s.master_seed}};
  root["channel"] = {{"tx_power_dbm", s.channel.tx_power_dbm},
                     {"carrier_hz", s.channel.carrier_hz},
                     {"reflection_loss_db", s.channel.reflection_loss_db},
                     {"noise_floor_dbm", s.channel.noise_floor_dbm},
                     {"max_order", s.channel.max_order}};
  root["noise"] = {{"sigma_tau_s", s.noise.sigma_tau_s},
                   {"sigma_theta_rad", s.noise.sigma_theta_rad},
                   {"sigma_phi_rad", s.noise.sigma_phi_rad},
                   {"pad_snr_db", s.noise.pad_snr_db}};
  root["imu"] = {{"sigma_step_m", s.imu.sigma_step},
                 {"bias_m", vec3_to(s.imu.bias)},
                 {"rng_seed", s.imu.rng_seed}};
  root["bsm"] = {{"sigma_fix_m", s.bsm.sigma_fix}, {"rng_seed", s.bsm.rng_seed}};
  json traj;
  json uav = json::array();
  for (const Vec3& p : s.uav_waypoints) uav.push_back(vec3_to(p));
  traj["uav"] = uav;
  json gmt = json::array();
  for (const Vec3& p : s.gmt_waypoints) gmt.push_back(vec3_to(p));
  traj["gmt"] = gmt;
  root["trajectories"] = traj;
  root["lscn"] = {{"K", s.k},
                  {"stage1", file.architecture.stage1_sizes},
                  {"stage2", file.architecture.stage2_hidden},
                  {"train",
                   {{"learning_rate", file.train.learning_rate},
                    {"batch_size", file.train.batch_size},
                    {"epochs", file.train.epochs},
                    {"rng_seed", file.train.rng_seed}}}};
  if (s.dataset_grid) {
    json tx = json::array();
    for (const Vec3& p : s.dataset_tx_positions) tx.push_back(vec3_to(p));
    root["dataset"] = {{"grid",
                        {{"x0", s.dataset_grid->x0},
                         {"x1", s.dataset_grid->x1},
                         {"nx", s.dataset_grid->nx},
                         {"y0", s.dataset_grid->y0},
                         {"y1", s.dataset_grid->y1},
                         {"ny", s.dataset_grid->ny},
                         {"z_levels", s.dataset_grid->z_levels}}},
                       {"tx", tx}};
  }
  return root.dump(2) + "\n";
}

ScenarioFile load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

void save_scenario(const ScenarioFile& file, const std::string& path) {
  write_text_file(path, serialize_scenario(file));
}

std::string serialize_dataset(const Dataset& dataset) {
  std::ostringstream out;
  out << "csmap-dataset v1\n";
  out << "k " << dataset.k << "\n";
  out << "rows " << dataset.features.rows() << "\n";
  for (Eigen::Index i = 0; i < dataset.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < dataset.features.cols(); ++j) {
      out << fmt17(dataset.features(i, j)) << ' ';
    }
    out << dataset.labels[static_cast<std::size_t>(i)] << "\n";
  }
  return out.str();
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::FormatError,
                 "dataset line " + std::to_string(line_no) + ": " + why);
  };
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw fail("unexpected end of file");
    ++line_no;
  };

  next_line();
  if (line != "csmap-dataset v1") throw fail("bad header, expected 'csmap-dataset v1'");
  next_line();
  Dataset dataset;
  long rows = 0;
  if (std::sscanf(line.c_str(), "k %d", &dataset.k) != 1 || dataset.k < 1) {
    throw fail("expected 'k <int>'");
  }
  next_line();
  if (std::sscanf(line.c_str(), "rows %ld", &rows) != 1 || rows < 0) {
    throw fail("expected 'rows <count>'");
  }
  const Eigen::Index width = 3 * dataset.k;
  dataset.features.resize(rows, width);
  dataset.labels.resize(static_cast<std::size_t>(rows));
  for (long r = 0; r < rows; ++r) {
    next_line();
    std::istringstream fields(line);
    for (Eigen::Index j = 0; j < width; ++j) {
      double v = 0.0;
      if (!(fields >> v)) throw fail("expected " + std::to_string(width) + " features");
      dataset.features(r, j) = v;
    }
    int label = 0;
    if (!(fields >> label) || label < 0 || label > 2) {
      throw fail("expected a label in {0, 1, 2}");
    }
    std::string extra;
    if (fields >> extra) throw fail("trailing fields");
    dataset.labels[static_cast<std::size_t>(r)] = label;
  }
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  write_text_file(path, serialize_dataset(dataset));
}

Dataset load_dataset(const std::string& path) {
  return parse_dataset(read_text_file(path));
}

namespace {

json layer_to_json(const DenseLayer& layer) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      row.push_back(layer.weights(r, c));
    }
    rows.push_back(row);
  }
  json bias = json::array();
  for (Eigen::Index r = 0; r < layer.bias.size(); ++r) bias.push_back(layer.bias[r]);
  return {{"weights", rows}, {"bias", bias}};
}

DenseLayer layer_from_json(const json& j) {
  const json& rows = require(j, "weights", "layer");
  const json& bias = require(j, "bias", "layer");
  if (rows.empty()) throw Error(ErrorCode::FormatError, "layer has no weights");
  DenseLayer layer;
  layer.weights.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != layer.weights.cols()) {
      throw Error(ErrorCode::FormatError, "ragged weight matrix");
    }
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      layer.weights(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  layer.bias.resize(static_cast<Eigen::Index>(bias.size()));
  for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
    layer.bias[r] = bias[static_cast<std::size_t>(r)].get<double>();
  }
  if (layer.bias.size() != layer.weights.rows()) {
    throw Error(ErrorCode::FormatError, "bias length does not match weight rows");
  }
  return layer;
}

}  // namespace

std::string serialize_model(const LscnModel& model) {
  json root;
  root["format"] = "csmap-model";
  root["version"] = 1;
  root["k"] = model.k;
  json s1 = json::array(), s2 = json::array();
  for (const DenseLayer& l : model.stage1) s1.push_back(layer_to_json(l));
  for (const DenseLayer& l : model.stage2) s2.push_back(layer_to_json(l));
  root["stage1"] = s1;
  root["stage2"] = s2;
  json mins = json::array(), maxs = json::array();
  for (Eigen::Index i = 0; i < model.scaler.size(); ++i) {
    mins.push_back(model.scaler.mins()[i]);
    maxs.push_back(model.scaler.maxs()[i]);
  }
  root["scaler"] = {{"min", mins}, {"max", maxs}};
  return root.dump(2) + "\n";
}

LscnModel parse_model(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FormatError, std::string("model is not valid JSON: ") + e.what());
  }
  if (get_or<std::string>(root, "format", "") != "csmap-model") {
    throw Error(ErrorCode::FormatError, "not a csmap model file");
  }
  if (get_or(root, "version", 0) != 1) {
    throw Error(ErrorCode::FormatError, "unsupported model version");
  }
  LscnModel model;
  model.k = require(root, "k", "model").get<int>();
  for (const json& l : require(root, "stage1", "model")) {
    model.stage1.push_back(layer_from_json(l));
  }
  for (const json& l : require(root, "stage2", "model")) {
    model.stage2.push_back(layer_from_json(l));
  }
  if (model.stage1.empty() || model.stage2.empty()) {
    throw Error(ErrorCode::FormatError, "model stages must be non-empty");
  }
  if (model.stage2.back().bias.size() != 3) {
    throw Error(ErrorCode::FormatError, "final layer must have 3 units");
  }
  const json& scaler = require(root, "scaler", "model");
  const auto mins = require(scaler, "min", "scaler").get<std::vector<double>>();
  const auto maxs = require(scaler, "max", "scaler").get<std::vector<double>>();
  model.scaler = FeatureScaler(
      Eigen::Map<const Eigen::VectorXd>(mins.data(), static_cast<Eigen::Index>(mins.size())),
      Eigen::Map<const Eigen::VectorXd>(maxs.data(), static_cast<Eigen::Index>(maxs.size())));
  return model;
}

void save_model(const LscnModel& model, const std::string& path) {
  write_text_file(path, serialize_model(model));
}

LscnModel load_model(const std::string& path) {
  return parse_model(read_text_file(path));
}

std::string serialize_ply(const PointCloudMap& map) {
  for (const MappedPoint& mp : map.points) {
    if (!std::isfinite(mp.mapped.x) || !std::isfinite(mp.mapped.y) ||
        !std::isfinite(mp.mapped.z)) {
      throw Error(ErrorCode::IoError, "point cloud contains non-finite coordinates");
    }
  }
  std::ostringstream out;
  out << "ply\n"
      << "format ascii 1.0\n"
      << "comment generated by csmap\n"
      << "element vertex " << map.points.size() << "\n"
      << "property double x\n"
      << "property double y\n"
      << "property double z\n"
      << "property double error_m\n"
      << "end_header\n";
  for (const MappedPoint& mp : map.points) {
    const double err = mp.truth ? distance(mp.mapped, *mp.truth) : -1.0;
    out << fmt17(mp.mapped.x) << ' ' << fmt17(mp.mapped.y) << ' '
        << fmt17(mp.mapped.z) << ' ' << fmt17(err) << "\n";
  }
  return out.str();
}

void export_ply(const PointCloudMap& map, const std::string& path) {
  write_text_file(path, serialize_ply(map));
}

std::string serialize_metrics(const RunReport& report) {
  std::size_t paired = 0;
  for (const MappedPoint& mp : report.map.points) paired += mp.truth ? 1 : 0;
  double pose_sq = 0.0;
  for (double e : report.pose_errors) pose_sq += e * e;
  const double pose_rmse =
      report.pose_errors.empty()
          ? 0.0
          : std::sqrt(pose_sq / static_cast<double>(report.pose_errors.size()));
  std::ostringstream out;
  out << "metric,value\n";
  out << "schema_version,1\n";
  out << "steps," << report.steps << "\n";
  out << "mapped_points," << report.mapped_points << "\n";
  out << "paired_points," << paired << "\n";
  out << "point_mse_m," << fmt17(report.point_mse) << "\n";
  out << "point_mse_sq_m2," << fmt17(report.point_mse_sq) << "\n";
  out << "surface_mean_m," << fmt17(report.surface_stats.mean) << "\n";
  out << "surface_median_m," << fmt17(report.surface_stats.median) << "\n";
  out << "surface_max_m," << fmt17(report.surface_stats.max) << "\n";
  out << "pose_rmse_m," << fmt17(pose_rmse) << "\n";
  out << "solver_failures," << report.solver_failures << "\n";
  out << "empty_snapshots," << report.empty_snapshots << "\n";
  return out.str();
}

std::string serialize_confusion(const RunReport& report) {
  std::ostringstream out;
  out << "true\\predicted,los,first_order_nlos,higher_order_nlos\n";
  const char* names[3] = {"los", "first_order_nlos", "higher_order_nlos"};
  for (int t = 0; t < 3; ++t) {
    out << names[t];
    for (int p = 0; p < 3; ++p) out << ',' << report.confusion[t][p];
    out << "\n";
  }
  return out.str();
}

std::string serialize_history(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const EpochStats& e = history[i];
    out << i << ',' << fmt17(e.train_loss) << ',' << fmt17(e.train_accuracy) << ','
        << fmt17(e.val_loss) << ',' << fmt17(e.val_accuracy) << "\n";
  }
  return out.str();
}

std::string serialize_sweep(const std::vector<KSweepRow>& rows) {
  std::ostringstream out;
  out << "k,train_accuracy,val_accuracy\n";
  for (const KSweepRow& r : rows) {
    out << r.k << ',' << fmt17(r.train_accuracy) << ',' << fmt17(r.val_accuracy) << "\n";
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace csmap
