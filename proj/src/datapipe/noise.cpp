#include "datapipe/noise.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace fusiondrive::data {

int NoiseSchedule::period_frames(double dt) const {
  return std::max(1, static_cast<int>(std::lround(period / dt)));
}

int NoiseSchedule::duration_frames(double dt) const {
  return std::clamp(static_cast<int>(std::lround(duration / dt)), 0, period_frames(dt));
}

int NoiseSchedule::phase_frames(double dt) const {
  return std::clamp(static_cast<int>(std::lround(phase / dt)), 0,
                    period_frames(dt) - duration_frames(dt));
}

bool NoiseSchedule::flagged(int64_t frame, double dt) const {
  if (!(magnitude_max > 0.0) || frame < 0) return false;
  const int64_t k = frame % period_frames(dt);
  return k >= phase_frames(dt) && k < phase_frames(dt) + duration_frames(dt);
}

double NoiseSchedule::envelope(int index_in_window, double dt) const {
  const int n = duration_frames(dt);
  if (index_in_window < 0 || index_in_window >= n) return 0.0;
  const int ramp = std::max(1, static_cast<int>(std::lround(ramp_fraction * n)));
  const int from_end = n - 1 - index_in_window;
  const int edge = std::min(index_in_window, from_end);
  if (edge >= ramp) return 1.0;
  return static_cast<double>(edge + 1) / (ramp + 1);
}

double NoiseInjector::next(int64_t frame) {
  if (!schedule_.flagged(frame, dt_)) return 0.0;
  const int index = static_cast<int>(frame % schedule_.period_frames(dt_)) - schedule_.phase_frames(dt_);
  if (index == 0) {
    const double sign = rng_.bernoulli(0.5) ? 1.0 : -1.0;
    peak_ = sign * rng_.uniform(schedule_.magnitude_min, schedule_.magnitude_max);
  }
  return peak_ * schedule_.envelope(index, dt_);
}

}  // namespace fusiondrive::data
