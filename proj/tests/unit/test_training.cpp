#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "model/driving_net.hpp"
#include "support/expect_error.hpp"
#include "support/gradcheck.hpp"
#include "training/losses.hpp"
#include "training/nadam.hpp"
#include "training/objective.hpp"
#include "training/schedule.hpp"
#include "training/train_set.hpp"
#include "training/trainer.hpp"

using namespace fusiondrive;
using namespace fusiondrive::train;
using nn::Tensor;

namespace {

std::vector<double> random_vector(size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Random per-pixel distributions, away from the probability floor.
Tensor<double> random_probs(int n, int c, int h, int w, Rng& rng) {
  Tensor<double> p(n, c, h, w);
  for (int i = 0; i < n; ++i)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int k = 0; k < c; ++k) s += p.at(i, k, y, x) = rng.uniform(0.1, 1.0);
        for (int k = 0; k < c; ++k) p.at(i, k, y, x) /= s;
      }
  return p;
}

data::Sample synthetic_sample(int w, int h, uint64_t seed) {
  Rng rng(seed);
  data::Sample s;
  s.rgb = ImageF(w, h, 3);
  s.depth = ImageF(w, h, 1);
  s.semantic = LabelImage(w, h, 1);
  for (float& v : s.rgb.data) v = static_cast<float>(rng.uniform());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      s.depth.at(x, y) = static_cast<float>(y) / h;
      s.semantic.at(x, y) = static_cast<uint8_t>(y < h / 2 ? 0 : 1 + (x * 4) / w);
    }
  s.nav_command = nav_command_from_index(static_cast<int>(seed % kNumNavCommands));
  s.steer_gt = rng.uniform(-0.5, 0.5);
  s.speed_gt = rng.uniform(0.0, 9.0);
  return s;
}

TrainSet synthetic_set(int n, int size, uint64_t seed) {
  std::vector<data::Sample> samples;
  for (int i = 0; i < n; ++i) samples.push_back(synthetic_sample(48, 36, seed + i));
  return make_train_set(samples, size, 10.0);
}

TrainConfig quick_config() {
  TrainConfig c;
  c.batch_size = 4;
  c.max_epochs = 3;
  c.lr_patience_epochs = 1;
  c.early_stop_patience = 2;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(Losses, SteeringOracle) {
  const std::vector<double> p{0.2}, g{0.1};
  EXPECT_NEAR(steering_loss<double>(p, g, {}), 0.0225, 1e-9);
}

TEST(Losses, SteeringWeightGrowsWithTarget) {
  const std::vector<double> p0{0.1}, g0{0.0}, p1{0.6}, g1{0.5};
  EXPECT_NEAR(steering_loss<double>(p0, g0, {}), 0.01, 1e-12);
  EXPECT_NEAR(steering_loss<double>(p1, g1, {}), 3.5 * 3.5 * 0.01, 1e-12);
  // Symmetric in the sign of the target.
  const std::vector<double> pn{-0.6}, gn{-0.5};
  EXPECT_NEAR(steering_loss<double>(pn, gn, {}), steering_loss<double>(p1, g1, {}), 1e-15);
}

TEST(Losses, SpeedOracle) {
  const std::vector<double> p{0.2}, g{0.5};
  EXPECT_NEAR(speed_loss<double>(p, g), 0.09, 1e-9);
}

TEST(Losses, SceneOracleUniformPixel) {
  Tensor<double> probs(1, 5, 1, 1, 0.2);
  const std::vector<uint8_t> label{3};
  EXPECT_NEAR(scene_loss(probs, label), -std::log(0.2) / 5.0, 1e-9);
}

TEST(Losses, SceneFloorKeepsZeroProbabilityFinite) {
  Tensor<double> probs(1, 5, 1, 1, 0.0);
  probs.at(0, 0) = 1.0;
  const std::vector<uint8_t> label{2};
  EXPECT_NEAR(scene_loss(probs, label), -std::log(kProbabilityFloor) / 5.0, 1e-9);
}

TEST(Losses, TotalOracle) { EXPECT_NEAR(total_loss(0.1, 0.2, 0.3, {}), 1.8, 1e-9); }

TEST(Losses, EmptyAndMismatched) {
  const std::vector<double> none, one{0.1}, two{0.1, 0.2};
  EXPECT_FD_ERROR(steering_loss<double>(none, none, {}), ErrorCode::kEmptyInput);
  EXPECT_FD_ERROR(speed_loss<double>(none, none), ErrorCode::kEmptyInput);
  EXPECT_FD_ERROR(speed_loss<double>(one, two), ErrorCode::kShapeMismatch);
  Tensor<double> probs(1, 5, 2, 2, 0.2);
  const std::vector<uint8_t> short_labels{0, 1};
  EXPECT_FD_ERROR(scene_loss(probs, short_labels), ErrorCode::kShapeMismatch);
}

TEST(LossGradients, Steering) {
  Rng rng(1);
  auto pred = random_vector(24, rng);
  const auto gt = random_vector(24, rng);
  std::vector<double> grad(pred.size());
  steering_loss<double>(pred, gt, {}, grad);
  for (size_t i = 0; i < pred.size(); ++i) {
    const double fd = fdtest::central_difference(&pred[i], [&] { return steering_loss<double>(pred, gt, {}); });
    EXPECT_LE(fdtest::relative_error(grad[i], fd), 1e-5) << i;
  }
}

TEST(LossGradients, Speed) {
  Rng rng(2);
  auto pred = random_vector(24, rng, 0.0, 1.0);
  const auto gt = random_vector(24, rng, 0.0, 1.0);
  std::vector<double> grad(pred.size());
  speed_loss<double>(pred, gt, grad);
  for (size_t i = 0; i < pred.size(); ++i) {
    const double fd = fdtest::central_difference(&pred[i], [&] { return speed_loss<double>(pred, gt); });
    EXPECT_LE(fdtest::relative_error(grad[i], fd), 1e-5) << i;
  }
}

TEST(LossGradients, Scene) {
  Rng rng(3);
  auto probs = random_probs(2, 5, 3, 4, rng);
  std::vector<uint8_t> labels(2 * 3 * 4);
  for (auto& l : labels) l = static_cast<uint8_t>(rng.uniform_int(0, 4));
  Tensor<double> grad;
  scene_loss(probs, labels, &grad);
  for (int k = 0; k < 30; ++k) {
    const size_t i = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(probs.size()) - 1));
    const double fd = fdtest::central_difference(&probs.data[i], [&] { return scene_loss(probs, labels); });
    EXPECT_LE(fdtest::relative_error(grad.data[i], fd), 1e-5) << i;
  }
}

// The joint objective of a tiny end-to-end net, checked on every parameter
// tensor at probes with a nontrivial gradient.
TEST(LossGradients, TinyModelEndToEnd) {
  const model::ModelConfig cfg = fdtest::tiny_config();
  model::DrivingNet<double> net(cfg);
  ASSERT_LE(net.parameter_count(), 5000u);
  Rng rng(4);
  Tensor<double> x(4, 4, 32, 32);
  fdtest::fill_uniform(x, rng, 0.0, 1.0);
  const std::vector<NavCommand> cmds{NavCommand::kLaneFollow, NavCommand::kTurnLeft, NavCommand::kTurnRight,
                                     NavCommand::kStraight};
  const auto steer = random_vector(4, rng, -0.5, 0.5);
  const auto speed = random_vector(4, rng, 0.0, 1.0);
  std::vector<uint8_t> labels(4 * 32 * 32);
  for (auto& l : labels) l = static_cast<uint8_t>(rng.uniform_int(0, 4));
  const BatchTargets<double> targets{cmds, steer, speed, labels};

  net.zero_grad();
  batch_objective(net, x, targets, {}, true, true);
  auto loss = [&] { return batch_objective(net, x, targets, {}, true, false).total; };
  int probes = 0;
  double worst = 0.0;
  for (auto* p : net.parameters()) {
    std::vector<size_t> candidates;
    for (size_t i = 0; i < p->grad.size(); ++i)
      if (std::abs(p->grad.data[i]) > 1e-6) candidates.push_back(i);
    for (int k = 0; k < 2 && !candidates.empty(); ++k) {
      const size_t i = candidates[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(candidates.size()) - 1))];
      const double fd = fdtest::central_difference(&p->value.data[i], loss);
      worst = std::max(worst, fdtest::relative_error(p->grad.data[i], fd));
      ++probes;
    }
  }
  EXPECT_GE(probes, 20);
  EXPECT_LE(worst, 1e-5);
}

// Reference NAdam written from the textbook form with explicit momentum
// products, for one scalar parameter.
TEST(NadamTest, MatchesReference) {
  nn::Param<double> p{"w", Tensor<double>(1, 1, 1, 1, 0.5), Tensor<double>(1, 1, 1, 1)};
  Nadam<double> opt({&p});
  const std::vector<double> grads{0.3, -0.1, 0.7, 0.0, -0.4, 0.25};
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-7, psi = 4e-3;
  auto mu = [&](int t) { return b1 * (1.0 - 0.5 * std::pow(0.96, t * psi)); };
  double w = 0.5, m = 0.0, v = 0.0, prod = 1.0;
  for (size_t k = 0; k < grads.size(); ++k) {
    const int t = static_cast<int>(k) + 1;
    const double g = grads[k];
    prod *= mu(t);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double m_hat = mu(t + 1) * m / (1 - prod * mu(t + 1)) + (1 - mu(t)) * g / (1 - prod);
    const double v_hat = v / (1 - std::pow(b2, t));
    w -= lr * m_hat / (std::sqrt(v_hat) + eps);

    p.grad.data[0] = g;
    opt.step(lr);
    ASSERT_NEAR(p.value.data[0], w, 1e-12) << "step " << t;
  }
  EXPECT_EQ(opt.steps(), 6);
}

TEST(NadamTest, FirstStepFrozen) {
  nn::Param<double> p{"w", Tensor<double>(1, 1, 1, 1, 0.0), Tensor<double>(1, 1, 1, 1)};
  Nadam<double> opt({&p});
  p.grad.data[0] = 1.0;
  opt.step(1e-3);
  EXPECT_NEAR(p.value.data[0], -1.0e-3 * 1.0564518, 1e-9);
}

TEST(Schedule, FlatLossHalvesAfterPatience) {
  PlateauSchedule s(3e-4, 0.5, 5, 20, 1.0);
  for (int e = 1; e <= 4; ++e) {
    const auto step = s.observe(1.0);
    EXPECT_FALSE(step.decayed);
    EXPECT_DOUBLE_EQ(s.lr(), 3e-4);
  }
  EXPECT_TRUE(s.observe(1.0).decayed);
  EXPECT_DOUBLE_EQ(s.lr(), 1.5e-4);
  for (int e = 6; e <= 9; ++e) s.observe(1.0);
  EXPECT_DOUBLE_EQ(s.lr(), 1.5e-4);
  s.observe(1.0);
  EXPECT_DOUBLE_EQ(s.lr(), 7.5e-5);
}

TEST(Schedule, ImprovementResetsCounters) {
  PlateauSchedule s(1.0, 0.5, 2, 3);
  EXPECT_TRUE(s.observe(5.0).improved);
  s.observe(5.0);
  EXPECT_TRUE(s.observe(4.0).improved);
  EXPECT_FALSE(s.observe(4.5).decayed);
  EXPECT_TRUE(s.observe(4.0).decayed);
  EXPECT_TRUE(s.observe(4.0).stop);
  EXPECT_DOUBLE_EQ(s.best(), 4.0);
  EXPECT_EQ(s.epochs_since_best(), 3);
}

TEST(Schedule, RejectsBadParameters) {
  EXPECT_FD_ERROR(PlateauSchedule(0.0, 0.5, 1, 1), ErrorCode::kConfig);
  EXPECT_FD_ERROR(PlateauSchedule(1.0, 1.5, 1, 1), ErrorCode::kConfig);
  EXPECT_FD_ERROR(PlateauSchedule(1.0, 0.5, 0, 1), ErrorCode::kConfig);
}

TEST(TrainSetTest, QuantizesAndNormalizes) {
  const TrainSet set = synthetic_set(3, 32, 10);
  EXPECT_EQ(set.frames(), 3u);
  EXPECT_EQ(set.rgb.size(), 3u * 32 * 32 * 3);
  EXPECT_EQ(set.depth.size(), 3u * 32 * 32);
  for (float s : set.speed) {
    EXPECT_GE(s, 0.0f);
    EXPECT_LE(s, 0.9f);
  }
  const std::vector<uint32_t> entries{2, 0};
  const Batch b = make_batch(set, entries, 4);
  EXPECT_EQ(b.x.n, 2);
  EXPECT_EQ(b.x.c, 4);
  EXPECT_EQ(b.steer[0], set.steer[set.order[2]]);
  EXPECT_EQ(b.commands[1], set.command[set.order[0]]);
  for (float v : b.x.data) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_EQ(make_batch(set, entries, 3).x.c, 3);
  EXPECT_FD_ERROR(make_batch(set, entries, 2), ErrorCode::kInvalidArgument);
}

TEST(TrainSetTest, AugmentationTouchesColourOnly) {
  const TrainSet set = synthetic_set(6, 32, 20);
  std::vector<uint32_t> entries{0, 1, 2, 3, 4, 5};
  data::AugmentParams always;
  always.probability = 1.0;
  const Batch plain = make_batch(set, entries, 4);
  const Batch aug = make_batch(set, entries, 4, &always, 3);
  EXPECT_EQ(plain.labels, aug.labels);
  EXPECT_EQ(plain.steer, aug.steer);
  EXPECT_EQ(plain.speed, aug.speed);
  EXPECT_EQ(plain.commands, aug.commands);
  EXPECT_NE(plain.x, aug.x);
  for (int i = 0; i < 6; ++i)
    for (int p = 0; p < 32 * 32; ++p) ASSERT_EQ(plain.x.at(i, 3, p / 32, p % 32), aug.x.at(i, 3, p / 32, p % 32));
  EXPECT_EQ(make_batch(set, entries, 4, &always, 3).x, aug.x);
}

TEST(TrainSetTest, ObservationMatchesStoredFrame) {
  const data::Sample s = synthetic_sample(48, 36, 30);
  TrainSet set(32);
  set.add(s, 10.0);
  const std::vector<uint32_t> entries{0};
  EXPECT_EQ(observation_input(s.rgb, s.depth, 32, 4), make_batch(set, entries, 4).x);
}

TEST(Trainer, DeterministicForSeed) {
  const TrainSet train = synthetic_set(8, 32, 40);
  const TrainSet val = synthetic_set(4, 32, 60);
  const auto a = train_model(train, val, fdtest::tiny_config(), quick_config(), {});
  const auto b = train_model(train, val, fdtest::tiny_config(), quick_config(), {});
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.report.to_csv(), b.report.to_csv());
  EXPECT_EQ(a.report.epochs.size(), 3u);
  EXPECT_EQ(a.net->parameters()[0]->value, b.net->parameters()[0]->value);
}

TEST(Trainer, ReducesTrainingLoss) {
  const TrainSet train = synthetic_set(8, 32, 70);
  TrainConfig cfg = quick_config();
  cfg.max_epochs = 15;
  cfg.lr_patience_epochs = 5;
  cfg.early_stop_patience = 10;
  cfg.augment = false;
  cfg.initial_lr = 3e-3;
  const auto r = train_model(train, TrainSet(32), fdtest::tiny_config(), cfg, {});
  EXPECT_LT(r.report.best_validation, r.report.baseline.total);
  EXPECT_GT(r.report.best_epoch, 0);
}

TEST(Trainer, EarlyStopAndCallback) {
  const TrainSet train = synthetic_set(4, 32, 80);
  TrainConfig cfg = quick_config();
  cfg.max_epochs = 50;
  cfg.initial_lr = 1e-12;
  cfg.lr_patience_epochs = 1;
  cfg.early_stop_patience = 2;
  int calls = 0;
  const auto r = train_model(train, train, fdtest::tiny_config(), cfg, {}, [&](const EpochRecord&) { ++calls; });
  EXPECT_EQ(r.report.stop, StopReason::kEarlyStop);
  EXPECT_LT(r.report.epochs.size(), 50u);
  EXPECT_EQ(calls, static_cast<int>(r.report.epochs.size()));
}

TEST(Trainer, EmptyAndDivergent) {
  EXPECT_FD_ERROR(train_model(TrainSet(32), TrainSet(32), fdtest::tiny_config(), quick_config(), {}),
                  ErrorCode::kEmptyInput);
  TrainSet bad = synthetic_set(4, 32, 90);
  bad.steer[1] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_FD_ERROR(train_model(bad, TrainSet(32), fdtest::tiny_config(), quick_config(), {}),
                  ErrorCode::kDivergence);
}

TEST(Trainer, FitMetricsOnPerfectTargets) {
  const TrainSet set = synthetic_set(4, 32, 100);
  model::DrivingNet<float> net(fdtest::tiny_config());
  const FitMetrics m = evaluate_fit(net, set);
  EXPECT_GE(m.steer_mae, 0.0);
  EXPECT_GE(m.pixel_accuracy, 0.0);
  EXPECT_LE(m.pixel_accuracy, 1.0);
  model::ModelConfig no_dec = fdtest::tiny_config();
  no_dec.use_decoder = false;
  model::DrivingNet<float> plain(no_dec);
  EXPECT_TRUE(std::isnan(evaluate_fit(plain, set).pixel_accuracy));
}
