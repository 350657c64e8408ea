// csmap: desk-scale radio-geometry SLAM simulator.
//
// Subcommands:
//   gen-dataset   scenario -> labeled link-state dataset
//   train         dataset -> classifier model + training history
//   sweep-k       dataset -> accuracy table over input widths K
//   run           scenario + model -> point cloud, metrics, confusion matrix
//   solve         one delay/angle observation -> reflection point
//   validate      consistency and invariant checks for a scenario

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csmap/io.hpp"
#include "csmap/reflector.hpp"
#include "csmap/scenes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

csmap::Vec3 parse_vec3_arg(const std::string& text, const std::string& flag) {
  csmap::Vec3 v;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v.x, &v.y, &v.z, &extra) != 3) {
    throw CLI::ValidationError(flag, "expected 'x,y,z'");
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "expected a comma-separated integer list");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "list is empty");
  return out;
}

struct TrainFlags {
  double learning_rate = 0.001;
  int batch_size = 1000;
  int epochs = 100;
  std::uint64_t seed = 0;
  std::string stage1 = "10";
  std::string stage2 = "50,100";

  void attach(CLI::App* cmd) {
    cmd->add_option("--lr", learning_rate, "Adam learning rate");
    cmd->add_option("--batch", batch_size, "mini-batch size");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--seed", seed, "training seed");
    cmd->add_option("--stage1", stage1, "stage-1 layer widths, comma separated");
    cmd->add_option("--stage2", stage2, "stage-2 hidden widths, comma separated");
  }

  csmap::TrainConfig config() const {
    csmap::TrainConfig cfg;
    cfg.learning_rate = learning_rate;
    cfg.batch_size = batch_size;
    cfg.epochs = epochs;
    cfg.rng_seed = seed;
    return cfg;
  }

  csmap::Architecture architecture() const {
    csmap::Architecture arch;
    arch.stage1_sizes = parse_int_list(stage1, "--stage1");
    arch.stage2_hidden = parse_int_list(stage2, "--stage2");
    return arch;
  }
};

int cmd_gen_dataset(const std::string& scenario_path, const std::string& out_path) {
  const csmap::ScenarioFile file = csmap::load_scenario(scenario_path);
  const csmap::Scenario& s = file.scenario;
  if (!s.dataset_grid) {
    throw csmap::Error(csmap::ErrorCode::InvalidScenario,
                       "scenario has no 'dataset' section");
  }
  csmap::DatasetConfig cfg{s.channel, s.noise, s.k, s.master_seed};
  const csmap::Dataset dataset = csmap::generate_lscn_dataset(
      s.mesh, *s.dataset_grid, s.dataset_tx_positions, cfg);
  csmap::save_dataset(dataset, out_path);
  std::cout << "wrote " << dataset.features.rows() << " samples (K=" << dataset.k
            << ") to " << out_path << "\n";
  return kExitOk;
}

int cmd_train(const std::string& dataset_path, const std::string& model_path,
              const std::string& history_path, const TrainFlags& flags) {
  const csmap::Dataset dataset = csmap::load_dataset(dataset_path);
  auto [model, history] = csmap::train(dataset, flags.config(), flags.architecture());
  csmap::save_model(model, model_path);
  if (!history_path.empty()) {
    csmap::write_text_file(history_path, csmap::serialize_history(history));
  }
  if (!history.empty()) {
    std::cout << "final train acc " << history.back().train_accuracy << ", val acc "
              << history.back().val_accuracy << "\n";
  }
  std::cout << "wrote model to " << model_path << "\n";
  return kExitOk;
}

int cmd_sweep_k(const std::string& dataset_path, const std::string& out_path,
                const std::string& ks_text, const TrainFlags& flags) {
  const csmap::Dataset dataset = csmap::load_dataset(dataset_path);
  const std::vector<int> ks = parse_int_list(ks_text, "--ks");
  const auto rows = csmap::k_sweep(dataset, ks, flags.config(), flags.architecture());
  csmap::write_text_file(out_path, csmap::serialize_sweep(rows));
  for (const csmap::KSweepRow& r : rows) {
    std::cout << "K=" << r.k << " train acc " << r.train_accuracy << " val acc "
              << r.val_accuracy << "\n";
  }
  return kExitOk;
}

int cmd_run(const std::string& scenario_path, const std::string& model_path,
            const std::string& out_dir, bool oracle) {
  const csmap::ScenarioFile file = csmap::load_scenario(scenario_path);
  csmap::LscnModel model;
  if (!oracle) {
    if (model_path.empty()) {
      throw CLI::ValidationError("--model", "required unless --oracle is given");
    }
    model = csmap::load_model(model_path);
  }
  const csmap::RunReport report =
      csmap::run(file.scenario, oracle ? nullptr : &model);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  csmap::export_ply(report.map, (dir / "cloud.ply").string());
  csmap::write_text_file((dir / "metrics.csv").string(),
                         csmap::serialize_metrics(report));
  csmap::write_text_file((dir / "confusion.csv").string(),
                         csmap::serialize_confusion(report));
  std::cout << "steps " << report.steps << ", mapped " << report.mapped_points
            << " points, point_mse " << report.point_mse << " m\n";
  std::cout << "outputs in " << out_dir << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& uav, const std::string& gmt, double tau, double theta,
              double phi, const std::string& method) {
  csmap::FirstOrderObservation obs;
  obs.uav = parse_vec3_arg(uav, "--uav");
  obs.gmt = parse_vec3_arg(gmt, "--gmt");
  obs.tau = tau;
  obs.aoa = {theta, phi};
  const csmap::Vec3 p = (method == "closed") ? csmap::solve_closed_form(obs)
                                             : csmap::solve_parametric(obs);
  std::printf("%.6f %.6f %.6f\n", p.x, p.y, p.z);
  return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
  const csmap::ScenarioFile file = csmap::load_scenario(scenario_path);
  const csmap::Scenario& s = file.scenario;
  csmap::validate_scenario(s);

  int checked_paths = 0;
  int first_order = 0;
  double worst_residual = 0.0;
  double worst_solver = 0.0;
  for (int t = 0; t <= s.total_steps; ++t) {
    const csmap::Vec3& uav = s.uav_waypoints[static_cast<std::size_t>(t)];
    const csmap::Vec3& gmt =
        s.gmt_waypoints[static_cast<std::size_t>(t / s.fix_interval)];
    const csmap::ChannelSnapshot snap =
        csmap::snapshot(gmt, uav, s.mesh, s.channel, t);
    for (std::size_t i = 0; i + 1 < snap.paths.size(); ++i) {
      if (snap.paths[i].snr_db < snap.paths[i + 1].snr_db) {
        throw csmap::Error(csmap::ErrorCode::InvalidScenario,
                           "snapshot not SNR-sorted at step " + std::to_string(t));
      }
    }
    for (const csmap::PropagationPath& path : snap.paths) {
      ++checked_paths;
      const double delay_err =
          std::abs(path.delay * csmap::kSpeedOfLight - path.path_length);
      worst_residual = std::max(worst_residual, delay_err);
      if (path.order >= 1) {
        const auto cand = csmap::to_candidate(path, gmt, uav, s.mesh);
        const auto res = csmap::residuals_multi(cand);
        // Arrival constraints are tan-form and lose digits at the azimuth
        // and polar singularities; skip them there.
        const bool tan_ok = std::abs(std::cos(path.aoa.phi)) > 1e-5 &&
                            std::abs(std::sin(path.aoa.theta)) > 1e-5;
        const std::size_t kept = tan_ok ? res.size() : res.size() - 2;
        for (std::size_t i = 0; i < kept; ++i) {
          worst_residual = std::max(worst_residual, std::abs(res[i]));
        }
      }
      if (path.order == 1) {
        ++first_order;
        csmap::FirstOrderObservation obs{uav, gmt, path.delay, path.aoa};
        const csmap::Vec3 solved = csmap::solve_parametric(obs);
        worst_solver = std::max(
            worst_solver, csmap::distance(solved, path.reflection_points.front()));
      }
    }
  }
  std::cout << "scenario ok: " << checked_paths << " paths checked, " << first_order
            << " single-bounce, max residual " << worst_residual
            << ", max solver error " << worst_solver << " m\n";
  if (worst_residual > 1e-9 || worst_solver > 1e-6) {
    throw csmap::Error(csmap::ErrorCode::InvalidScenario,
                       "invariant violation: residuals exceed tolerance");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale radio-geometry SLAM simulator"};
  app.require_subcommand(1);

  std::string scenario_path, dataset_path, model_path, out_path, history_path;
  std::string uav_text, gmt_text, method = "parametric", ks_text = "1,3,5,7,9";
  double tau = 0.0, theta = 0.0, phi = 0.0;
  bool oracle = false;
  TrainFlags train_flags;

  auto* gen = app.add_subcommand("gen-dataset", "generate a labeled link-state dataset");
  gen->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  gen->add_option("--out", out_path, "output dataset file")->required();

  auto* train = app.add_subcommand("train", "train the link-state classifier");
  train->add_option("--dataset", dataset_path, "dataset file")->required();
  train->add_option("--out", model_path, "output model file")->required();
  train->add_option("--history", history_path, "per-epoch loss/accuracy CSV");
  train_flags.attach(train);

  auto* sweep = app.add_subcommand("sweep-k", "train once per K and tabulate accuracy");
  sweep->add_option("--dataset", dataset_path, "dataset file (built at the largest K)")
      ->required();
  sweep->add_option("--out", out_path, "output CSV")->required();
  sweep->add_option("--ks", ks_text, "comma-separated K values");
  train_flags.attach(sweep);

  auto* run = app.add_subcommand("run", "simulate a flight and map the scene");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--model", model_path, "trained model file");
  run->add_option("--out", out_path, "output directory")->required();
  run->add_flag("--oracle", oracle, "classify with true link states");

  auto* solve = app.add_subcommand("solve", "solve one single-bounce observation");
  solve->add_option("--uav", uav_text, "receiver position x,y,z")->required();
  solve->add_option("--gmt", gmt_text, "transmitter position x,y,z")->required();
  solve->add_option("--tau", tau, "time of flight in seconds")->required();
  solve->add_option("--theta", theta, "polar arrival angle in radians")->required();
  solve->add_option("--phi", phi, "azimuth arrival angle in radians")->required();
  solve->add_option("--method", method, "parametric (default) or closed")
      ->check(CLI::IsMember({"parametric", "closed"}));

  auto* validate = app.add_subcommand("validate", "check scenario invariants");
  validate->add_option("--scenario", scenario_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_dataset(scenario_path, out_path);
    if (train->parsed()) return cmd_train(dataset_path, model_path, history_path, train_flags);
    if (sweep->parsed()) return cmd_sweep_k(dataset_path, out_path, ks_text, train_flags);
    if (run->parsed()) return cmd_run(scenario_path, model_path, out_path, oracle);
    if (solve->parsed()) return cmd_solve(uav_text, gmt_text, tau, theta, phi, method);
    if (validate->parsed()) return cmd_validate(scenario_path);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const csmap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case csmap::ErrorCode::FormatError:
      case csmap::ErrorCode::IoError:
      case csmap::ErrorCode::InvalidScenario:
        return kExitUsage;
      default:
        return kExitNumeric;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
