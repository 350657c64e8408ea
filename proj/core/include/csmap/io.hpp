#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csmap/lscn.hpp"
#include "csmap/runner.hpp"

namespace csmap {

/// Parsed scenario file: the simulation scenario plus classifier
/// architecture and training settings. Serialization is canonical: parsing
/// the serialized form reproduces the same value (line-style trajectories
/// are expanded to waypoints on first parse).
struct ScenarioFile {
  Scenario scenario;
  Architecture architecture;
  TrainConfig train;
  std::optional<std::string> builtin_name;          // set when scene was builtin
  std::map<int, std::string> facet_materials;       // optional per-facet tags
};

ScenarioFile parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioFile& file);
ScenarioFile load_scenario(const std::string& path);
void save_scenario(const ScenarioFile& file, const std::string& path);

/// Plain-text dataset: header (format tag, K, row count), then one row per
/// sample of 3K features (17 significant digits) and the integer label.
/// Round-trips bit-identically; malformed input raises FormatError with the
/// offending line number.
std::string serialize_dataset(const Dataset& dataset);
Dataset parse_dataset(const std::string& text);
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Self-describing JSON model file with a version field, architecture, K,
/// scaler, and all weights.
std::string serialize_model(const LscnModel& model);
LscnModel parse_model(const std::string& text);
void save_model(const LscnModel& model, const std::string& path);
LscnModel load_model(const std::string& path);

/// ASCII PLY 1.0 with per-vertex x y z and error_m (the pairing distance,
/// or -1 for points without ground truth).
std::string serialize_ply(const PointCloudMap& map);
void export_ply(const PointCloudMap& map, const std::string& path);

/// CSV artifacts with frozen, versioned columns.
std::string serialize_metrics(const RunReport& report);
std::string serialize_confusion(const RunReport& report);
std::string serialize_history(const TrainHistory& history);
std::string serialize_sweep(const std::vector<KSweepRow>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace csmap
