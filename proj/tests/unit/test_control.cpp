#include <gtest/gtest.h>

#include <cmath>

#include "common/rng.hpp"
#include "control/pid.hpp"
#include "simworld/world.hpp"
#include "support/expect_error.hpp"

using namespace fusiondrive;
using namespace fusiondrive::control;

namespace {

struct StepTrace {
  std::vector<double> speed;  // one entry per 0.1 s tick
};

StepTrace closed_loop(double target, double seconds, double initial = 0.0) {
  PidState pid;
  sim::VehicleState ego;
  ego.speed = initial;
  StepTrace trace;
  const double dt = 0.1;
  for (int i = 0; i < static_cast<int>(std::lround(seconds / dt)); ++i) {
    const Actuation a = pid_update(target, ego.speed, dt, pid);
    ego = sim::integrate_ego(ego, {0.0, a.throttle, a.brake}, dt, {});
    trace.speed.push_back(ego.speed);
  }
  return trace;
}

// First time after which the speed stays inside the band for the rest of the trace.
double settle_time(const StepTrace& t, double target, double band) {
  int last_out = -1;
  for (size_t i = 0; i < t.speed.size(); ++i)
    if (std::abs(t.speed[i] - target) > band) last_out = static_cast<int>(i);
  return 0.1 * (last_out + 1);
}

}  // namespace

TEST(Pid, ZeroErrorGivesNoActuation) {
  PidState s;
  const Actuation a = pid_update(0.0, 0.0, 0.1, s);
  EXPECT_EQ(a.throttle, 0.0);
  EXPECT_EQ(a.brake, 0.0);
}

TEST(Pid, OverspeedBrakes) {
  PidState s;
  const Actuation a = pid_update(0.0, 5.0, 0.1, s);
  EXPECT_EQ(a.throttle, 0.0);
  EXPECT_GT(a.brake, 0.0);
}

TEST(Pid, FirstSampleHasNoDerivativeKick) {
  PidState s;
  const Actuation a = pid_update(1.0, 0.0, 0.1, s);
  EXPECT_NEAR(a.throttle, s.kp * 1.0 + s.ki * 0.1, 1e-12);
}

TEST(Pid, ResetKeepsGains) {
  PidState s;
  s.kp = 2.0;
  pid_update(3.0, 0.0, 0.1, s);
  s.reset();
  EXPECT_EQ(s.kp, 2.0);
  EXPECT_EQ(s.integral, 0.0);
  EXPECT_FALSE(s.has_prev);
}

TEST(Pid, RejectsNonPositiveDt) {
  PidState s;
  EXPECT_FD_ERROR(pid_update(1.0, 0.0, 0.0, s), ErrorCode::kInvalidArgument);
  EXPECT_FD_ERROR(pid_update(1.0, 0.0, -0.1, s), ErrorCode::kInvalidArgument);
}

TEST(Pid, StepResponseSettlesWithinFiveSeconds) {
  const StepTrace t = closed_loop(5.0, 30.0);
  EXPECT_LE(settle_time(t, 5.0, 0.25), 5.0);
  double peak = 0.0;
  for (double v : t.speed) peak = std::max(peak, v);
  EXPECT_LE(peak, 5.5);
}

TEST(Pid, StepDownSettles) {
  const StepTrace t = closed_loop(2.0, 30.0, 8.0);
  EXPECT_LE(settle_time(t, 2.0, 0.25), 5.0);
}

// Property: every reachable constant target is tracked to +-0.25 m/s.
TEST(PidProperty, TracksConstantTargets) {
  for (double target = 0.5; target <= 9.5; target += 0.5) {
    const StepTrace t = closed_loop(target, 40.0);
    for (size_t i = t.speed.size() - 50; i < t.speed.size(); ++i)
      ASSERT_NEAR(t.speed[i], target, 0.25) << "target " << target;
  }
}

// Property: throttle and brake are exclusive and bounded, and the integral
// respects its limit, for arbitrary inputs.
TEST(PidProperty, FuzzBoundsAndExclusion) {
  Rng rng(2024);
  PidState s;
  for (int i = 0; i < 10000; ++i) {
    if (rng.bernoulli(0.01)) s.reset();
    const Actuation a = pid_update(rng.uniform(-2.0, 12.0), rng.uniform(0.0, 10.0), rng.uniform(0.01, 0.5), s);
    ASSERT_EQ(a.throttle * a.brake, 0.0);
    ASSERT_GE(a.throttle, 0.0);
    ASSERT_LE(a.throttle, 1.0);
    ASSERT_GE(a.brake, 0.0);
    ASSERT_LE(a.brake, 1.0);
    ASSERT_LE(std::abs(s.integral), s.integral_limit);
  }
}

TEST(Steer, Denormalize) {
  EXPECT_DOUBLE_EQ(denormalize_steer(0.5), 35.0);
  EXPECT_DOUBLE_EQ(denormalize_steer(0.0), 0.0);
  EXPECT_DOUBLE_EQ(denormalize_steer(-1.0), -70.0);
  EXPECT_DOUBLE_EQ(denormalize_steer(1.7), 70.0);
  EXPECT_DOUBLE_EQ(normalize_steer_deg(35.0), 0.5);
}

// Property: linear inside the clamp range.
TEST(SteerProperty, Linearity) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-0.5, 0.5);
    const double b = rng.uniform(-0.5, 0.5);
    ASSERT_NEAR(denormalize_steer(a) + denormalize_steer(b), denormalize_steer(a + b), 1e-12);
  }
}
