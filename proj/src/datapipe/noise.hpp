#pragma once

#include <cstdint>

#include "common/rng.hpp"

namespace fusiondrive::data {

/// Periodic steering perturbation used while recording expert episodes.
struct NoiseSchedule {
  double period = 5.0;          // s
  double duration = 1.0;        // s
  double phase = 4.0;           // s, window start inside each period
  double magnitude_min = 0.15;  // normalized steer
  double magnitude_max = 0.30;
  double ramp_fraction = 0.3;   // share of the window spent on each ramp

  int period_frames(double dt) const;
  int duration_frames(double dt) const;
  int phase_frames(double dt) const;
  /// Window membership of frame k; never true when magnitude_max is 0.
  bool flagged(int64_t frame, double dt) const;
  /// Unit-peak ramp-hold-ramp envelope at a position inside the window.
  double envelope(int index_in_window, double dt) const;

  bool operator==(const NoiseSchedule&) const = default;
};

/// Draws one signed peak per window and returns the additive steer noise.
class NoiseInjector {
 public:
  NoiseInjector(NoiseSchedule schedule, uint64_t seed, double dt)
      : schedule_(schedule), rng_(seed), dt_(dt) {}

  double next(int64_t frame);

 private:
  NoiseSchedule schedule_;
  Rng rng_;
  double dt_;
  double peak_ = 0.0;
};

}  // namespace fusiondrive::data
