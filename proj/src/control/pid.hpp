#pragma once

namespace fusiondrive::control {

struct PidState {
  double kp = 0.5;
  double ki = 0.1;
  double kd = 0.02;
  double integral_limit = 1.5;  // m/s * s
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;

  /// Clears the accumulated terms, keeping the gains.
  void reset() {
    integral = 0.0;
    prev_error = 0.0;
    has_prev = false;
  }

  bool operator==(const PidState&) const = default;
};

struct Actuation {
  double throttle = 0.0;
  double brake = 0.0;
};

/// One controller tick tracking target_speed (m/s). Throws Error(kInvalidArgument)
/// when dt is not positive.
Actuation pid_update(double target_speed, double measured_speed, double dt, PidState& state);

/// Normalized steer to degrees (x70), input clamped to [-1, 1].
double denormalize_steer(double steer_norm);
double normalize_steer_deg(double degrees);

inline constexpr double kSteerScaleDeg = 70.0;

}  // namespace fusiondrive::control
