#pragma once

#include <cstdint>

#include "csmap/geometry.hpp"

namespace csmap {

/// Inertial odometry modeled at the displacement level: each measured
/// per-step displacement is the true one plus a constant bias and isotropic
/// Gaussian noise.
struct ImuModel {
  double sigma_step = 0.0;  // meters, per axis per step
  Vec3 bias;                // meters per step
  std::uint64_t rng_seed = 0;
};

/// Absolute position-fix source with isotropic Gaussian error.
struct BsmModel {
  double sigma_fix = 0.0;  // meters, per axis
  std::uint64_t rng_seed = 0;
};

/// Dead-reckoning state: the latest absolute fix plus displacement
/// accumulated since. estimate == last_fix on fix steps and
/// last_fix + imu_track otherwise.
struct HpcState {
  int t = 0;         // current time step
  int n = 0;         // fixes consumed so far (initial fix is n = 0)
  Vec3 last_fix;
  Vec3 imu_track;
  Vec3 estimate;
};

struct HpcEvent {
  enum class Kind { ImuDisplacement, BsmFix };
  Kind kind = Kind::ImuDisplacement;
  Vec3 value;  // measured displacement, or the new absolute fix
};

/// Measured displacement from true_prev to true_next at step t.
/// Deterministic in (rng_seed, t).
Vec3 imu_step(const ImuModel& model, const Vec3& true_prev, const Vec3& true_next, int t);

/// The n-th absolute fix. Deterministic in (rng_seed, n).
Vec3 bsm_fix(const BsmModel& model, const Vec3& true_pos, int n);

/// State at t = 0 from the initial fix.
HpcState hpc_init(const Vec3& initial_fix);

/// Advance one step. Steps with (t+1) % T_c == 0 must carry a fix event
/// (fix counter bumps, track resets); all others an IMU displacement.
HpcState hpc_update(const HpcState& state, int t_c, const HpcEvent& event);

}  // namespace csmap
