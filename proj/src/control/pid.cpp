#include "control/pid.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace fusiondrive::control {

Actuation pid_update(double target_speed, double measured_speed, double dt, PidState& state) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  const double error = target_speed - measured_speed;
  state.integral = std::clamp(state.integral + error * dt, -state.integral_limit, state.integral_limit);
  const double derivative = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.has_prev = true;

  const double u = state.kp * error + state.ki * state.integral + state.kd * derivative;
  Actuation out;
  if (u >= 0.0) {
    out.throttle = std::min(u, 1.0);
  } else {
    out.brake = std::min(-u, 1.0);
  }
  return out;
}

double denormalize_steer(double steer_norm) {
  return std::clamp(steer_norm, -1.0, 1.0) * kSteerScaleDeg;
}

double normalize_steer_deg(double degrees) { return degrees / kSteerScaleDeg; }

}  // namespace fusiondrive::control
