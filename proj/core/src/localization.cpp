#include "csmap/localization.hpp"

#include <stdexcept>

#include "csmap/rng.hpp"

namespace csmap {
namespace {

Vec3 gaussian3(Rng& rng, double sigma) {
  return {sigma * rng.gaussian(), sigma * rng.gaussian(), sigma * rng.gaussian()};
}

}  // namespace

Vec3 imu_step(const ImuModel& model, const Vec3& true_prev, const Vec3& true_next, int t) {
  Rng rng(derive_seed(model.rng_seed, SeedStream::Imu, static_cast<std::uint64_t>(t)));
  return (true_next - true_prev) + model.bias + gaussian3(rng, model.sigma_step);
}

Vec3 bsm_fix(const BsmModel& model, const Vec3& true_pos, int n) {
  Rng rng(derive_seed(model.rng_seed, SeedStream::Bsm, static_cast<std::uint64_t>(n)));
  return true_pos + gaussian3(rng, model.sigma_fix);
}

HpcState hpc_init(const Vec3& initial_fix) {
  HpcState state;
  state.last_fix = initial_fix;
  state.estimate = initial_fix;
  return state;
}

HpcState hpc_update(const HpcState& state, int t_c, const HpcEvent& event) {
  if (t_c < 1) throw std::invalid_argument("T_c must be >= 1");
  HpcState next = state;
  next.t = state.t + 1;
  const bool fix_step = (next.t % t_c) == 0;
  if (fix_step != (event.kind == HpcEvent::Kind::BsmFix)) {
    throw std::invalid_argument(fix_step ? "step t with t % T_c == 0 needs a fix event"
                                         : "non-fix step needs an IMU displacement");
  }
  if (fix_step) {
    next.n = state.n + 1;
    next.last_fix = event.value;
    next.imu_track = {0.0, 0.0, 0.0};
    next.estimate = next.last_fix;
  } else {
    next.imu_track += event.value;
    next.estimate = next.last_fix + next.imu_track;
  }
  return next;
}

}  // namespace csmap
